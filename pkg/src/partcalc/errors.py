"""Exception hierarchy shared by every partcalc module."""

from __future__ import annotations


class PartitionError(ValueError):
    """Base class for malformed partition data."""


class OverlapError(PartitionError):
    pass


class CoverageError(PartitionError):
    pass


class RangeError(PartitionError):
    pass


class ArityMismatch(PartitionError):
    pass


class PreconditionError(ValueError):
    """An operation was called outside the domain where it is defined."""


class NotAProjection(PreconditionError):
    pass


class BoundExceeded(RuntimeError):
    pass


class ShapeError(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


class Unsupported(ValueError):
    pass


class VerificationFailed(AssertionError):
    """An internal post-condition did not hold; always a bug in partcalc."""


class ParseError(ValueError):
    """Raised for malformed text input; carries the byte offset of the problem."""

    def __init__(self, message: str, position: int = 0, expected: str | None = None):
        self.position = position
        self.expected = expected
        detail = f"{message} at offset {position}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)
