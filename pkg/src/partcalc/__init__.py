"""Partition calculus, bounded category closure and exact relation checks."""

from .partition import (
    COPAIR,
    CROSSLINE,
    DOWN1,
    EMPTY,
    FOURBLOCK,
    ID,
    PAIR,
    POSITIONER,
    UP1,
    L,
    Partition,
    U,
    b,
    compose,
    format_partition,
    identity,
    involute,
    partition_from_text,
    pi,
    reflect,
    sigma,
    tau,
    tensor,
)

__version__ = "0.1.0"
