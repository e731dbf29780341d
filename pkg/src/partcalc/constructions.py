"""
Partition constructions available inside any generalized category.

Every construction is written twice over: a ``*_term`` function that builds the
operation word as a :class:`~partcalc.terms.Term`, and a public wrapper that
accepts partitions and returns a :class:`Construction` (the result plus a
replayable trace). Outputs whose defining property can be stated independently
of the construction (rotation clauses, projection identities) are checked
after evaluation rather than trusted.
"""

from __future__ import annotations

from typing import NamedTuple, Union

from . import partition as pc
from . import terms as tm
from .errors import NotAProjection, PreconditionError, RangeError, VerificationFailed
from .partition import L, Partition, U
from .terms import ConstructionTrace, Term

PartitionLike = Union[Partition, Term]


class Construction(NamedTuple):
    result: Partition
    trace: ConstructionTrace


def as_term(x: PartitionLike, name: str = "source") -> Term:
    return x if isinstance(x, Term) else tm.source(x, name)


def _built(t: Term) -> Construction:
    return Construction(t.value, t.trace())


def _lower_only(t: Term, what: str) -> None:
    if t.k != 0:
        raise PreconditionError(f"{what} must lie in P(0,l), got P({t.k},{t.l})")


def _upper_only(t: Term, what: str) -> None:
    if t.l != 0:
        raise PreconditionError(f"{what} must lie in P(k,0), got P({t.k},{t.l})")


# -- nesting ----------------------------------------------------------------


def nest_term(p: Term, q: Term, gap: int) -> Term:
    _lower_only(p, "p")
    _lower_only(q, "q")
    if not 0 <= gap <= p.l:
        raise RangeError(f"gap {gap} outside 0..{p.l}")
    below = tm.tensor(tm.identity_power(gap), q, tm.identity_power(p.l - gap))
    return tm.compose(below, p)


def nest(p: PartitionLike, q: PartitionLike, gap: int) -> Construction:
    """Place q between legs ``gap`` and ``gap + 1`` of p."""
    return _built(nest_term(as_term(p), as_term(q), gap))


def multi_nest_term(p: Term, s: int, m: int) -> Term:
    _lower_only(p, "p")
    if not 1 <= s <= p.l:
        raise RangeError(f"leg {s} outside 1..{p.l}")
    if m < 1:
        raise RangeError("multi nesting needs m >= 1")
    out = p
    for _ in range(m - 1):
        out = nest_term(p, out, s)
    return out


def multi_nest(p: PartitionLike, s: int, m: int) -> Construction:
    return _built(multi_nest_term(as_term(p), s, m))


# -- line rotation ----------------------------------------------------------


def is_weak_line_rotation(p: Partition, p2: Partition) -> bool:
    """Clause (a): points 2..l of p sit at 1..l-1 of p2 with the same blocks."""
    if p.k or p2.k or p.l != p2.l:
        return False
    a, c = p.lower_labels, p2.lower_labels
    n = p.l
    return all((a[i] == a[j]) == (c[i - 1] == c[j - 1]) for i in range(1, n) for j in range(i + 1, n))


def is_line_rotation(p: Partition, p2: Partition) -> bool:
    """Clauses (a) and (b): additionally the first point of p reappears last."""
    if not is_weak_line_rotation(p, p2):
        return False
    a, c = p.lower_labels, p2.lower_labels
    n = p.l
    return all((a[0] == a[j]) == (c[j - 1] == c[n - 1]) for j in range(1, n))


def cyclic_rotation(p: Partition, r: int = 1) -> Partition:
    """Move the first r lower points of p to the right end, keeping all blocks."""
    if p.k:
        raise PreconditionError("cyclic rotation is defined here for P(0,l) only")
    if p.l == 0:
        return p
    r %= p.l
    low = p.lower_labels
    return Partition.from_labels(0, p.l, low[r:] + low[:r])


def weak_line_rotate_term(p: Term, q: Term) -> Term:
    _lower_only(p, "p")
    _upper_only(q, "q")
    k, l = q.k, p.l
    if k < 1 or l < 1:
        raise PreconditionError("weak line rotation needs p in P(0,l) and q in P(k,0) with k, l >= 1")
    top = tm.power(p, k)
    middle = tm.tensor(tm.identity_power(k * l - 1), p, tm.identity_power(1))
    bottom = tm.tensor(tm.power(q, l), tm.identity_power(l))
    return tm.stack(top, middle, bottom)


def weak_line_rotate_left_term(p: Term, q: Term) -> Term:
    return tm.reflect(weak_line_rotate_term(tm.reflect(p), tm.reflect(q)))


def weak_line_rotate(p: PartitionLike, q: PartitionLike, left: bool = False) -> Construction:
    """A weakly line rotated version of p, eating the leftover legs with q."""
    pt, qt = as_term(p), as_term(q)
    t = weak_line_rotate_left_term(pt, qt) if left else weak_line_rotate_term(pt, qt)
    check = t.value if not left else pc.reflect(t.value)
    base = pt.value if not left else pc.reflect(pt.value)
    if not is_weak_line_rotation(base, check):
        raise VerificationFailed("weak line rotation violates the defining clause")
    return _built(t)


def line_rotate_term(p: Term, q: Term) -> Term:
    _lower_only(p, "p")
    _upper_only(q, "q")
    k, l = q.k, p.l
    if l < 1 or k < 1:
        raise PreconditionError("line rotation needs k, l >= 1")
    qs = q.dual()
    pairs = pc.same_block_pairs(qs.value)
    if not pairs:
        raise PreconditionError("q* consists of singletons only; no line rotation is available")
    t = max(t for _, t in pairs)
    rotated = qs
    for _ in range(k - t):
        rotated = weak_line_rotate_left_term(rotated, q)
    if max(t for _, t in pc.same_block_pairs(rotated.value)) != k:
        raise VerificationFailed("left rotation did not bring a connected pair to the last leg")
    top = rotated
    middle = tm.tensor(tm.identity_power(k - 1), p, tm.identity_power(1))
    bottom = tm.tensor(rotated.dual(), tm.identity_power(l))
    return tm.stack(top, middle, bottom)


def line_rotate(p: PartitionLike, q: PartitionLike) -> Construction:
    """A line rotated version of p: its first point moves to the right end, still attached.

    Needs q in P(k,0) with q* not all singletons; the word uses q and q*.
    """
    pt = as_term(p)
    t = line_rotate_term(pt, as_term(q))
    if not is_line_rotation(pt.value, t.value):
        raise VerificationFailed("line rotation violates the defining clauses")
    return _built(t)


def rotate_until_attached(p: Term) -> tuple[Term, int]:
    """Line-rotate p (eating with p*) until its first point is not a singleton."""
    value = p.value
    if pc.is_all_singletons(value):
        raise PreconditionError("p consists of singletons only")
    low = value.lower_labels
    r = next(i for i in range(value.l) if low.count(low[i]) > 1)
    out = p
    eater = p.dual()
    for _ in range(r):
        out = line_rotate_term(out, eater)
    return out, r


# -- doubling ---------------------------------------------------------------


def shifted_doubling_term(p: Term, s: int) -> Term:
    _lower_only(p, "p")
    if not 1 <= s <= p.l:
        raise RangeError(f"s = {s} outside 1..{p.l}")
    upper = tm.tensor(p, tm.identity_power(s))
    lower = tm.tensor(tm.identity_power(s), tm.reflect(p.dual()))
    return tm.compose(lower, upper)


def shifted_doubling(p: PartitionLike, s: int) -> Construction:
    """(id^{⊗s} ⊗ reflect(p)*) (p ⊗ id^{⊗s}); uses p and p*."""
    return _built(shifted_doubling_term(as_term(p), s))


def is_projection(q: Partition) -> bool:
    return q.k == q.l and pc.involute(q) == q and pc.compose(q, q).result == q


def partial_doubling_term(p: Term, s: int) -> Term:
    _lower_only(p, "p")
    l = p.l
    if not 1 <= s <= l:
        raise RangeError(f"s = {s} outside 1..{l}")
    if pc.is_all_singletons(p.value):
        raise PreconditionError("partial doubling needs p with a block of size >= 2")
    m = l - s
    if m == 0:
        return tm.compose(p, p.dual())
    attached, _ = rotate_until_attached(p)
    nested = multi_nest_term(attached, 1, m)
    tail = nested.l - m
    top = tm.tensor(tm.identity_power(s), nested)
    middle = tm.compose(tm.tensor(p, tm.identity_power(tail)), tm.tensor(p.dual(), tm.identity_power(tail)))
    bottom = tm.tensor(tm.identity_power(s), nested.dual())
    return tm.stack(top, middle, bottom)


def partial_doubling(p: PartitionLike, s: int) -> Construction:
    """Partial doubling of p on its first s legs; the result is a projection in P(s,s)."""
    t = partial_doubling_term(as_term(p), s)
    if not is_projection(t.value):
        raise VerificationFailed("partial doubling did not produce q = q* = qq")
    return _built(t)


def projection_symmetry_check(q: Partition) -> bool:
    """For q = q* = qq: whenever upper i and lower j share a block, so do lower i and upper j."""
    if not is_projection(q):
        raise NotAProjection("q must satisfy q = q* = qq")
    for i in range(1, q.k + 1):
        for j in range(1, q.l + 1):
            if q.same_block(U(i), L(j)):
                if not (q.same_block(U(i), L(i)) and q.same_block(U(j), L(j)) and q.same_block(U(i), U(j))):
                    return False
    return True


def weak_restriction_term(q: Term, p1: Term, p2: Term, a: int, b: int) -> Term:
    _lower_only(p1, "p1")
    _upper_only(p2, "p2")
    s = q.k
    if q.l != s:
        raise PreconditionError("q must lie in P(s,s)")
    if not 0 <= a < b <= s:
        raise RangeError(f"need 0 <= a < b <= s, got a={a}, b={b}, s={s}")
    k, l = p2.k, p1.l
    if k * l < max(a, s - b):
        raise RangeError(f"k*l = {k * l} too small to cap {a} left and {s - b} right legs")
    width = b - a
    top = tm.tensor(tm.power(p1, k), tm.identity_power(width), tm.power(p1, k))
    middle = tm.tensor(tm.identity_power(k * l - a), q, tm.identity_power(k * l - (s - b)))
    bottom = tm.tensor(tm.power(p2, l), tm.identity_power(width), tm.power(p2, l))
    return tm.stack(top, middle, bottom)


def weak_restriction(q: PartitionLike, p1: PartitionLike, p2: PartitionLike, a: int, b: int) -> Construction:
    """Cut q down to its legs a+1..b, capping the rest with copies of p1 and p2."""
    return _built(weak_restriction_term(as_term(q), as_term(p1), as_term(p2), a, b))


# -- graded noncrossing partitions -----------------------------------------


def m_rotation_term(p: Term, m: int, bm: Term | None = None) -> Term:
    if p.k < 1:
        raise PreconditionError("m-rotation needs at least one upper point")
    if m < 1:
        raise RangeError("m must be >= 1")
    bm = bm if bm is not None else tm.source(pc.b(m), "generator")
    upper = tm.tensor(bm, tm.identity_power(p.k - 1))
    lower = tm.tensor(tm.identity_power(m - 1), p)
    return tm.compose(lower, upper)


def m_rotation(p: PartitionLike, m: int) -> Construction:
    """(id^{⊗m-1} ⊗ p)(b_m ⊗ id^{⊗k-1}): the upper left point of p moves to the lower row."""
    return _built(m_rotation_term(as_term(p), m))


class GeneratorWords:
    """Words over the sources b_m and b_m* for members of NC_[m], m >= 3."""

    def __init__(self, m: int):
        if m < 3:
            raise RangeError("the two-generator presentation needs m >= 3")
        self.m = m
        self.bm = tm.source(pc.b(m), "generator")
        self.bm_star = tm.source(pc.involute(pc.b(m)), "generator")
        self._blocks: dict[int, Term] = {1: self.bm}

    def block(self, n: int) -> Term:
        """b_{nm} as a word."""
        if n < 1:
            raise RangeError("n >= 1")
        if n not in self._blocks:
            m = self.m
            if n == 2:
                self._blocks[2] = tm.compose(
                    tm.tensor(self.bm_star, tm.identity_power(2 * m)), multi_nest_term(self.bm, 1, 3)
                )
            else:
                prev = n - 1
                cap = tm.tensor(tm.identity_power(m + 1), self.bm_star, tm.identity_power(prev * m - 1))
                self._blocks[n] = tm.compose(cap, tm.tensor(self.block(2), self.block(prev)))
        return self._blocks[n]

    def block_star(self, n: int) -> Term:
        return self.block(n).dual()

    def single_block(self, a: int, b: int) -> Term:
        """The one-block partition on a upper and b lower points, a - b divisible by m.

        Uses (b_m* ⊗ id^{⊗b})(id^{⊗c} ⊗ b_{ym} ⊗ b_{xm}*)(b_m ⊗ id^{⊗a}) with
        c = a - (x-1)m. When c = 0 and both rows are nonempty that word splits
        into two blocks, so the cap and cup are widened to b_{2m} and c = m.
        """
        m = self.m
        if (a - b) % m or a + b == 0:
            raise PreconditionError(f"no one-block member of NC_[{m}] with {a} upper and {b} lower points")
        x, y = a // m + 1, b // m + 1
        c = a - (x - 1) * m
        if c == 0 and a and b:
            # cap and cup now cover m ids and m points of each inner block
            cap, cup, c = self.block(2), self.block_star(2), m
        else:
            cap, cup = self.bm, self.bm_star
        upper = tm.tensor(cap, tm.identity_power(a))
        middle = tm.tensor(tm.identity_power(c), self.block(y), self.block_star(x))
        lower = tm.tensor(cup, tm.identity_power(b))
        return tm.stack(upper, middle, lower)

    def word(self, p: Partition) -> Term:
        """A word for any p in NC_[m] (raises if p is not a member)."""
        m = self.m
        if not pc.in_ncm(p, m):
            raise PreconditionError(f"{p} is not in NC_[{m}]")
        if p.size == 0:
            return tm.compose(self.bm_star, self.bm)
        if p.k > 0:
            rotated = _m_rotate(p, m)
            inner = self.word(rotated)
            cap = tm.tensor(self.bm_star, tm.identity_power(p.l))
            return tm.compose(cap, tm.tensor(tm.identity_power(1), inner))
        return self._lower_word(p.lower_labels)

    def _lower_word(self, labels: tuple[int, ...]) -> Term:
        first = labels[0]
        legs = [i for i, x in enumerate(labels) if x == first]
        end = legs[-1] + 1
        out = self.block(len(legs) // self.m)
        # nest the stretches between consecutive legs, rightmost first so gap indices stay valid
        for leg_no in range(len(legs) - 1, 0, -1):
            lo, hi = legs[leg_no - 1] + 1, legs[leg_no]
            if hi > lo:
                out = nest_term(out, self._lower_word(labels[lo:hi]), leg_no)
        if end < len(labels):
            out = tm.tensor(out, self._lower_word(labels[end:]))
        return out


def _m_rotate(p: Partition, m: int) -> Partition:
    """Partition-level m-rotation, used only to plan generator words."""
    return pc.compose(pc.tensor(pc.identity(m - 1), p), pc.tensor(pc.b(m), pc.identity(p.k - 1))).result
