"""
Operation words over partitions.

A :class:`Term` is an expression tree whose leaves are source partitions and
whose inner nodes are tensor, composition, reflection or involution. Evaluating
a term gives a partition together with the total number of loops removed by its
compositions. Flattening a term gives a :class:`ConstructionTrace`, a list of
steps that can be replayed with the partition-core operations alone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from . import partition as pc
from .errors import VerificationFailed
from .partition import EMPTY, ID, Partition, format_partition


class Term:
    """Base class; subclasses are immutable and compared by identity."""

    children: tuple[Term, ...] = ()

    @cached_property
    def value(self) -> Partition:
        return self._evaluate()[0]

    @cached_property
    def own_loops(self) -> int:
        return self._evaluate()[1]

    @cached_property
    def loops(self) -> int:
        """Loops removed anywhere inside this term (each node counted once per use)."""
        return self.own_loops + sum(c.loops for c in self.children)

    def _evaluate(self) -> tuple[Partition, int]:
        raise NotImplementedError

    @property
    def k(self) -> int:
        return self.value.k

    @property
    def l(self) -> int:
        return self.value.l

    def dual(self) -> Term:
        """The word for the involution of this term, pushed down to the sources."""
        raise NotImplementedError

    def trace(self) -> ConstructionTrace:
        steps: list[Step] = []
        done: set[int] = set()
        todo: list[tuple[Term, bool]] = [(self, False)]
        while todo:
            t, expanded = todo.pop()
            if id(t) in done:
                continue
            if expanded:
                done.add(id(t))
                steps.append(t._step())
                continue
            todo.append((t, True))
            todo.extend((c, False) for c in reversed(t.children))
        return ConstructionTrace(tuple(steps))

    def _step(self) -> Step:
        raise NotImplementedError

    # Operator sugar mirroring the expression language: a @ b is a ⊗ b,
    # a >> b composes b below a.
    def __matmul__(self, other: Term) -> Term:
        return tensor(self, other)

    def __rshift__(self, below: Term) -> Term:
        return compose(below, self)


class Source(Term):
    def __init__(self, p: Partition, name: str = "source"):
        self.p = p
        self.name = name

    def _evaluate(self):
        return self.p, 0

    def dual(self) -> Term:
        return Source(pc.involute(self.p), self.name)

    def _step(self) -> Step:
        return Step(self.name, (), self.p, 0)

    def __repr__(self):
        return f"Source({format_partition(self.p)})"


class Tensor(Term):
    def __init__(self, a: Term, b: Term):
        self.children = (a, b)

    def _evaluate(self):
        a, b = self.children
        return pc.tensor(a.value, b.value), 0

    def dual(self) -> Term:
        a, b = self.children
        return tensor(a.dual(), b.dual())

    def _step(self) -> Step:
        a, b = self.children
        return Step("tensor", (a.value, b.value), self.value, 0)


class Compose(Term):
    """``lower`` written below ``upper``."""

    def __init__(self, lower: Term, upper: Term):
        self.children = (lower, upper)

    def _evaluate(self):
        lower, upper = self.children
        out = pc.compose(lower.value, upper.value)
        return out.result, out.removed_loops

    def dual(self) -> Term:
        lower, upper = self.children
        return compose(upper.dual(), lower.dual())

    def _step(self) -> Step:
        lower, upper = self.children
        return Step("compose", (lower.value, upper.value), self.value, self.own_loops)


class Reflect(Term):
    def __init__(self, a: Term):
        self.children = (a,)

    def _evaluate(self):
        return pc.reflect(self.children[0].value), 0

    def dual(self) -> Term:
        return Reflect(self.children[0].dual())

    def _step(self) -> Step:
        return Step("reflect", (self.children[0].value,), self.value, 0)


class Involute(Term):
    def __init__(self, a: Term):
        self.children = (a,)

    def _evaluate(self):
        return pc.involute(self.children[0].value), 0

    def dual(self) -> Term:
        return self.children[0]

    def _step(self) -> Step:
        return Step("involute", (self.children[0].value,), self.value, 0)


_EMPTY_TERM = Source(EMPTY, "empty")


def source(p: Partition, name: str = "source") -> Term:
    return Source(p, name)


def _balanced(parts: list[Term]) -> Term:
    while len(parts) > 1:
        nxt = [Tensor(parts[i], parts[i + 1]) for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


def identity_power(n: int) -> Term:
    """id^{⊗n} built from the identity source; n = 0 is the unit for tensor."""
    if n < 0:
        raise ValueError("negative tensor power")
    if n == 0:
        return _EMPTY_TERM
    return power(Source(ID, "identity"), n)


def _is_unit(t: Term) -> bool:
    return isinstance(t, Source) and t.p.size == 0


def tensor(*terms: Term) -> Term:
    """Left-to-right tensor product; unit factors are dropped."""
    parts = [t for t in terms if not _is_unit(t)]
    if not parts:
        return _EMPTY_TERM
    out = parts[0]
    for t in parts[1:]:
        out = Tensor(out, t)
    return out


def power(t: Term, n: int) -> Term:
    """t^{⊗n} as a balanced tree (keeps term depth logarithmic)."""
    if n == 0 or _is_unit(t):
        return _EMPTY_TERM
    return _balanced([t] * n)


def compose(lower: Term, upper: Term) -> Term:
    return Compose(lower, upper)


def stack(*layers: Term) -> Term:
    """Compose layers listed from top to bottom."""
    out = layers[0]
    for t in layers[1:]:
        out = Compose(t, out)
    return out


def reflect(t: Term) -> Term:
    return Reflect(t)


def involute(t: Term) -> Term:
    return Involute(t)


# -- traces -----------------------------------------------------------------

REPLAY_OPS = {"tensor", "compose", "reflect", "involute"}


@dataclass(frozen=True)
class Step:
    op: str
    operands: tuple[Partition, ...]
    result: Partition
    removed_loops: int = 0

    def to_line(self, n: int) -> str:
        args = " ".join(format_partition(p) for p in self.operands)
        return f"step {n}: {self.op}{' ' + args if args else ''} -> {format_partition(self.result)} loops={self.removed_loops}"

    def to_dict(self) -> dict:
        return {
            "op": self.op,
            "operands": [format_partition(p) for p in self.operands],
            "result": format_partition(self.result),
            "removed_loops": self.removed_loops,
        }


def apply_op(op: str, operands: Sequence[Partition]) -> tuple[Partition, int]:
    if op == "tensor":
        return pc.tensor(*operands), 0
    if op == "compose":
        out = pc.compose(*operands)
        return out.result, out.removed_loops
    if op == "reflect":
        return pc.reflect(operands[0]), 0
    if op == "involute":
        return pc.involute(operands[0]), 0
    raise ValueError(f"not a replayable operation: {op}")


@dataclass(frozen=True)
class ConstructionTrace:
    steps: tuple[Step, ...] = field(default_factory=tuple)

    @property
    def result(self) -> Partition:
        return self.steps[-1].result

    @property
    def total_loops(self) -> int:
        return sum(s.removed_loops for s in self.steps)

    def sources(self) -> set[Partition]:
        return {s.result for s in self.steps if s.op not in REPLAY_OPS}

    def ops_used(self) -> set[str]:
        return {s.op for s in self.steps if s.op in REPLAY_OPS}

    def replay(self, allowed_sources: Iterable[Partition] | None = None) -> Partition:
        """Recompute every step; raise :class:`VerificationFailed` on any mismatch.

        Operands must be sources or results of earlier steps. If
        ``allowed_sources`` is given, every source step must be one of them.
        """
        allowed = None if allowed_sources is None else set(allowed_sources)
        known: set[Partition] = set()
        for n, s in enumerate(self.steps, 1):
            if s.op in REPLAY_OPS:
                for o in s.operands:
                    if o not in known:
                        raise VerificationFailed(f"step {n}: operand {format_partition(o)} not derived yet")
                got, loops = apply_op(s.op, s.operands)
                if got != s.result or loops != s.removed_loops:
                    raise VerificationFailed(f"step {n}: replay gives {format_partition(got)} loops={loops}")
            elif allowed is not None and s.result not in allowed:
                raise VerificationFailed(f"step {n}: {format_partition(s.result)} is not an allowed source")
            known.add(s.result)
        return self.result

    def to_text(self) -> str:
        return "\n".join(s.to_line(n) for n, s in enumerate(self.steps, 1))

    def to_dict(self) -> dict:
        return {"steps": [s.to_dict() for s in self.steps], "result": format_partition(self.result)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def merge_traces(traces: Iterable[ConstructionTrace]) -> ConstructionTrace:
    """Concatenate traces, keeping the first step that produced each partition."""
    seen: set[Partition] = set()
    out: list[Step] = []
    for t in traces:
        for s in t.steps:
            if s.result not in seen:
                seen.add(s.result)
                out.append(s)
    return ConstructionTrace(tuple(out))
