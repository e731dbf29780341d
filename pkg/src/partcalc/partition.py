"""
Two-row set partitions and the four diagram operations.

A partition in P(k, l) has k upper and l lower points. Points are addressed by
row and a 1-based index counted from the left in each row. Internally every
partition is stored as a restricted growth string ``labels`` over the points in
the total order

    lower 1, ..., lower l, upper 1, ..., upper k

so that blocks are numbered by their minimal point. Two partitions are equal
iff ``(k, l, labels)`` agree, which makes hashing and deduplication cheap.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from .errors import ArityMismatch, CoverageError, OverlapError, ParseError, RangeError


class Row(enum.IntEnum):
    LOWER = 0
    UPPER = 1


class Point(NamedTuple):
    row: Row
    index: int

    def __str__(self) -> str:
        return f"{'u' if self.row is Row.UPPER else 'l'}{self.index}"


def U(i: int) -> Point:
    return Point(Row.UPPER, i)


def L(j: int) -> Point:
    return Point(Row.LOWER, j)


def _relabel(labels: Iterable[int]) -> tuple[int, ...]:
    """Renumber arbitrary block labels as a restricted growth string."""
    seen: dict[int, int] = {}
    out = []
    for x in labels:
        y = seen.get(x)
        if y is None:
            y = seen[x] = len(seen)
        out.append(y)
    return tuple(out)


@dataclass(frozen=True)
class Partition:
    k: int
    l: int
    labels: tuple[int, ...]

    def __post_init__(self):
        if self.k < 0 or self.l < 0 or len(self.labels) != self.k + self.l:
            raise RangeError(f"labels of length {len(self.labels)} do not fit P({self.k},{self.l})")
        top = -1
        for x in self.labels:
            if x > top + 1:
                raise ValueError("labels must form a restricted growth string; use canonicalize()")
            top = max(top, x)

    @classmethod
    def from_labels(cls, k: int, l: int, labels: Sequence[int]) -> Partition:
        """Build from any labelling of the points (lower row first, then upper)."""
        return cls(k, l, _relabel(labels))

    @classmethod
    def from_rows(cls, upper: Sequence[int], lower: Sequence[int]) -> Partition:
        return cls.from_labels(len(upper), len(lower), list(lower) + list(upper))

    @property
    def size(self) -> int:
        return self.k + self.l

    @property
    def n_blocks(self) -> int:
        return max(self.labels) + 1 if self.labels else 0

    @property
    def lower_labels(self) -> tuple[int, ...]:
        return self.labels[: self.l]

    @property
    def upper_labels(self) -> tuple[int, ...]:
        return self.labels[self.l :]

    def point_at(self, position: int) -> Point:
        if position < self.l:
            return L(position + 1)
        return U(position - self.l + 1)

    def position(self, point: Point) -> int:
        if point.row is Row.LOWER:
            if not 1 <= point.index <= self.l:
                raise RangeError(f"{point} out of range for P({self.k},{self.l})")
            return point.index - 1
        if not 1 <= point.index <= self.k:
            raise RangeError(f"{point} out of range for P({self.k},{self.l})")
        return self.l + point.index - 1

    @cached_property
    def blocks(self) -> tuple[tuple[Point, ...], ...]:
        out: list[list[Point]] = [[] for _ in range(self.n_blocks)]
        for pos, b in enumerate(self.labels):
            out[b].append(self.point_at(pos))
        return tuple(tuple(b) for b in out)

    def same_block(self, a: Point, b: Point) -> bool:
        return self.labels[self.position(a)] == self.labels[self.position(b)]

    def __str__(self) -> str:
        return format_partition(self)

    def __repr__(self) -> str:
        return f"Partition({format_partition(self)!r})"


EMPTY = Partition(0, 0, ())


@dataclass(frozen=True)
class ComposeOutcome:
    result: Partition
    removed_loops: int


def canonicalize(blocks: Iterable[Iterable[Point]], k: int, l: int) -> Partition:
    """Validate a raw block list and return the canonical partition."""
    if k < 0 or l < 0:
        raise RangeError("arities must be nonnegative")
    labels: list[int | None] = [None] * (k + l)
    for b, block in enumerate(blocks):
        block = list(block)
        if not block:
            raise CoverageError("empty block")
        for pt in block:
            pt = Point(Row(pt[0]), pt[1])
            if pt.row is Row.LOWER:
                if not 1 <= pt.index <= l:
                    raise RangeError(f"point {pt} outside P({k},{l})")
                pos = pt.index - 1
            else:
                if not 1 <= pt.index <= k:
                    raise RangeError(f"point {pt} outside P({k},{l})")
                pos = l + pt.index - 1
            if labels[pos] is not None:
                raise OverlapError(f"point {pt} lies in two blocks")
            labels[pos] = b
    missing = [str(Partition(k, l, (0,) * (k + l)).point_at(i)) for i, x in enumerate(labels) if x is None]
    if missing:
        raise CoverageError(f"points not covered: {', '.join(missing)}")
    return Partition.from_labels(k, l, labels)  # type: ignore[arg-type]


# -- the four operations ----------------------------------------------------


def tensor(p: Partition, q: Partition) -> Partition:
    """Horizontal concatenation: q is placed to the right of p."""
    off = p.n_blocks
    lower = list(p.lower_labels) + [x + off for x in q.lower_labels]
    upper = list(p.upper_labels) + [x + off for x in q.upper_labels]
    return Partition.from_labels(p.k + q.k, p.l + q.l, lower + upper)


def tensor_all(parts: Iterable[Partition]) -> Partition:
    out = EMPTY
    for p in parts:
        out = tensor(out, p)
    return out


def compose(q: Partition, p: Partition) -> ComposeOutcome:
    """Write q below p, glue the middle row and drop it.

    Requires ``p.l == q.k``. The result lies in P(p.k, q.l); closed components
    made only of middle points are counted in ``removed_loops``.
    """
    if p.l != q.k:
        raise ArityMismatch(f"cannot compose: upper operand has {p.l} lower points, lower operand has {q.k} upper points")
    bp = p.n_blocks
    parent = list(range(bp + q.n_blocks))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in zip(p.lower_labels, q.upper_labels):
        ra, rb = find(a), find(b + bp)
        if ra != rb:
            parent[ra] = rb
    lower = [find(x + bp) for x in q.lower_labels]
    upper = [find(x) for x in p.upper_labels]
    survivors = set(lower) | set(upper)
    roots = {find(x) for x in range(len(parent))}
    return ComposeOutcome(Partition.from_labels(p.k, q.l, lower + upper), len(roots - survivors))


def involute(p: Partition) -> Partition:
    """Turn p upside down: P(k, l) -> P(l, k)."""
    return Partition.from_labels(p.l, p.k, list(p.upper_labels) + list(p.lower_labels))


def reflect(p: Partition) -> Partition:
    """Mirror p at the vertical axis."""
    return Partition.from_labels(p.k, p.l, list(reversed(p.lower_labels)) + list(reversed(p.upper_labels)))


# -- structural predicates --------------------------------------------------


def cyclic_labels(p: Partition) -> list[int]:
    """Labels in cyclic order: lower row left to right, then upper row right to left."""
    return list(p.lower_labels) + list(reversed(p.upper_labels))


def is_noncrossing(p: Partition) -> bool:
    seq = cyclic_labels(p)
    # A block may only resume when every block opened after it has closed.
    last = {}
    for i, x in enumerate(seq):
        last[x] = i
    stack: list[int] = []
    for i, x in enumerate(seq):
        if stack and stack[-1] == x:
            pass
        elif x in stack:
            return False
        else:
            stack.append(x)
        if last[x] == i:
            stack.pop()
    return True


def grading_ok(p: Partition, m: int) -> bool:
    """Every block has (#upper - #lower) divisible by m."""
    if m < 1:
        raise RangeError("grading modulus must be >= 1")
    diff = [0] * p.n_blocks
    for x in p.lower_labels:
        diff[x] -= 1
    for x in p.upper_labels:
        diff[x] += 1
    return all(d % m == 0 for d in diff)


def in_ncm(p: Partition, m: int) -> bool:
    return grading_ok(p, m) and is_noncrossing(p)


@dataclass(frozen=True)
class BlockCensus:
    sizes: tuple[int, ...]
    has_singleton: bool
    through_blocks: tuple[tuple[Point, ...], ...]


def block_census(p: Partition) -> BlockCensus:
    sizes = tuple(sorted((len(b) for b in p.blocks), reverse=True))
    through = tuple(b for b in p.blocks if {pt.row for pt in b} == {Row.LOWER, Row.UPPER})
    return BlockCensus(sizes, 1 in sizes, through)


def is_all_singletons(p: Partition) -> bool:
    return p.n_blocks == p.size


def same_block_pairs(p: Partition) -> list[tuple[int, int]]:
    """All 1-based positions s < t on the lower row of p sharing a block."""
    low = p.lower_labels
    return [(s + 1, t + 1) for s in range(len(low)) for t in range(s + 1, len(low)) if low[s] == low[t]]


# -- named partitions -------------------------------------------------------

ID = Partition(1, 1, (0, 0))
UP1 = Partition(0, 1, (0,))
DOWN1 = Partition(1, 0, (0,))
PAIR = Partition(0, 2, (0, 0))
COPAIR = Partition(2, 0, (0, 0))
FOURBLOCK = Partition(2, 2, (0, 0, 0, 0))
CROSSLINE = Partition(0, 4, (0, 1, 0, 1))
POSITIONER = Partition(0, 4, (0, 1, 0, 2))


def identity(n: int = 1) -> Partition:
    """id^{⊗n}."""
    return Partition.from_labels(n, n, list(range(n)) + list(range(n)))


def b(m: int) -> Partition:
    """The single block on m lower points."""
    if m < 1:
        raise RangeError("b(m) needs m >= 1")
    return Partition(0, m, (0,) * m)


def _square(m: int, corner: Iterable[Point], extra_blocks: Iterable[Iterable[Point]], middle: range) -> Partition:
    blocks = [sorted(set(corner))]
    blocks += [list(bl) for bl in extra_blocks]
    blocks += [[U(i), L(i)] for i in middle]
    return canonicalize(blocks, m, m)


def pi(m: int) -> Partition:
    if m < 2:
        raise RangeError("pi(m) needs m >= 2")
    idx = {1, 2, m - 1, m}
    return _square(m, [U(i) for i in idx] + [L(i) for i in idx], [], range(3, m - 1))


def sigma(m: int) -> Partition:
    if m < 2:
        raise RangeError("sigma(m) needs m >= 2")
    return _square(m, [U(1), U(m), L(1), L(m)], [], range(2, m))


def tau(m: int) -> Partition:
    if m < 2:
        raise RangeError("tau(m) needs m >= 2")
    return _square(m, [U(1), U(m)], [[L(1), L(m)]], range(2, m))


NAMED_CONSTANTS: dict[str, Partition] = {
    "id": ID,
    "up1": UP1,
    "down1": DOWN1,
    "pair": PAIR,
    "copair": COPAIR,
    "fourblock": FOURBLOCK,
    "crossline": CROSSLINE,
    "positioner": POSITIONER,
    "empty": EMPTY,
}

NAMED_FAMILIES = {"b": b, "pi": pi, "sigma": sigma, "tau": tau, "idn": identity}


# -- text format ------------------------------------------------------------


def format_partition(p: Partition) -> str:
    body = "".join("{" + ",".join(str(pt) for pt in block) + "}" for block in p.blocks)
    return f"P({p.k},{p.l}):" + (f" {body}" if body else "")


_HEADER = re.compile(r"\s*P\s*\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*")
_TOKEN = re.compile(r"\s*([ulUL])\s*(\d+)\s*")
_NUMBER = re.compile(r"\s*(\d+)\s*")


def parse_partition(text: str, start: int = 0) -> tuple[Partition, int]:
    """Parse a partition literal beginning at ``start``; return it and the end offset.

    Two forms are accepted: ``P(k,l): {u1,l2}{l1}`` with row-labelled points and
    ``P(k,l)#{1,7,9}{2,5}`` using a single counterclockwise numbering (lower row
    1..l left to right, then upper row l+1..l+k right to left).
    """
    m = _HEADER.match(text, start)
    if not m:
        raise ParseError("bad partition header", start, "P(k,l)")
    k, l = int(m.group(1)), int(m.group(2))
    pos = m.end()
    if pos < len(text) and text[pos] == ":":
        numbered = False
    elif pos < len(text) and text[pos] == "#":
        numbered = True
    else:
        raise ParseError("bad partition header", pos, "':' or '#'")
    pos += 1
    blocks: list[list[Point]] = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text) or text[pos] != "{":
            break
        pos += 1
        block: list[Point] = []
        while True:
            if numbered:
                t = _NUMBER.match(text, pos)
                if not t:
                    raise ParseError("bad point", pos, "a point number")
                x = int(t.group(1))
                if not 1 <= x <= k + l:
                    raise ParseError(f"point {x} outside 1..{k + l}", pos)
                block.append(L(x) if x <= l else U(k - (x - l) + 1))
            else:
                t = _TOKEN.match(text, pos)
                if not t:
                    raise ParseError("bad point", pos, "u<i> or l<j>")
                row = Row.UPPER if t.group(1) in "uU" else Row.LOWER
                block.append(Point(row, int(t.group(2))))
            pos = t.end()
            if pos < len(text) and text[pos] == ",":
                pos += 1
                continue
            if pos < len(text) and text[pos] == "}":
                pos += 1
                break
            raise ParseError("unterminated block", pos, "',' or '}'")
        blocks.append(block)
    try:
        p = canonicalize(blocks, k, l)
    except (OverlapError, CoverageError, RangeError) as exc:
        raise ParseError(str(exc), start) from exc
    return p, pos


def partition_from_text(text: str) -> Partition:
    p, end = parse_partition(text)
    if text[end:].strip():
        raise ParseError("trailing input", end)
    return p
