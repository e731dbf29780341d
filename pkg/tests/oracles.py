"""Brute-force reference implementations used only by the tests.

Each oracle works from the definitions on explicit point sets and shares no
code with the package beyond the Partition container itself.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from partcalc.partition import L, Partition, Point, Row, U


def point_blocks(p: Partition) -> frozenset[frozenset[Point]]:
    return frozenset(frozenset(b) for b in p.blocks)


def blocks_from_lists(lower: list[list[int]] = (), upper: list[list[int]] = (), mixed=()) -> frozenset:
    """Helper: mixed is a list of blocks given as lists of ('u'|'l', index)."""
    out = [frozenset(L(i) for i in b) for b in lower] + [frozenset(U(i) for i in b) for b in upper]
    out += [frozenset(U(i) if r == "u" else L(i) for r, i in b) for b in mixed]
    return frozenset(out)


def compose_oracle(q: Partition, p: Partition) -> tuple[frozenset, int]:
    """q below p by explicit graph search over all three rows of points."""
    assert p.l == q.k
    nodes = [("top", pt) for pt in _points(p)] + [("bot", pt) for pt in _points(q)]
    adj: dict = {v: set() for v in nodes}
    for tag, part in (("top", p), ("bot", q)):
        for blk in part.blocks:
            for a, b in zip(blk, blk[1:]):
                adj[(tag, a)].add((tag, b))
                adj[(tag, b)].add((tag, a))
    for j in range(1, p.l + 1):
        adj[("top", L(j))].add(("bot", U(j)))
        adj[("bot", U(j))].add(("top", L(j)))
    seen, blocks, loops = set(), [], 0
    for v in nodes:
        if v in seen:
            continue
        comp, stack = [], [v]
        seen.add(v)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        outer = frozenset(
            pt for tag, pt in comp if (tag == "top" and pt.row is Row.UPPER) or (tag == "bot" and pt.row is Row.LOWER)
        )
        if outer:
            blocks.append(outer)
        else:
            loops += 1
    return frozenset(blocks), loops


def _points(p: Partition) -> list[Point]:
    return [L(j) for j in range(1, p.l + 1)] + [U(i) for i in range(1, p.k + 1)]


def tensor_oracle(p: Partition, q: Partition) -> frozenset:
    shifted = [frozenset(Point(pt.row, pt.index + (p.l if pt.row is Row.LOWER else p.k)) for pt in b) for b in q.blocks]
    return point_blocks(p) | frozenset(shifted)


def involute_oracle(p: Partition) -> frozenset:
    flip = lambda pt: Point(Row.UPPER if pt.row is Row.LOWER else Row.LOWER, pt.index)
    return frozenset(frozenset(flip(pt) for pt in b) for b in p.blocks)


def reflect_oracle(p: Partition) -> frozenset:
    mirror = lambda pt: Point(pt.row, (p.l if pt.row is Row.LOWER else p.k) + 1 - pt.index)
    return frozenset(frozenset(mirror(pt) for pt in b) for b in p.blocks)


def cyclic_points(p: Partition) -> list[Point]:
    return [L(j) for j in range(1, p.l + 1)] + [U(i) for i in range(p.k, 0, -1)]


def noncrossing_oracle(p: Partition) -> bool:
    """No a < b < c < d (cyclically) with a~c, b~d and a not~ b."""
    pts = cyclic_points(p)
    blk = {pt: i for i, b in enumerate(p.blocks) for pt in b}
    lab = [blk[pt] for pt in pts]
    for a, b, c, d in itertools.combinations(range(len(pts)), 4):
        if lab[a] == lab[c] and lab[b] == lab[d] and lab[a] != lab[b]:
            return False
    return True


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


def delta_oracle(p: Partition, alpha, beta) -> int:
    value = {U(i + 1): a for i, a in enumerate(alpha)} | {L(j + 1): b for j, b in enumerate(beta)}
    return int(all(len({value[pt] for pt in b}) == 1 for b in p.blocks))


def t_dense_oracle(p: Partition, n: int) -> list[list[int]]:
    """Scan every (beta, alpha); rows are beta (first factor most significant)."""
    rows = list(itertools.product(range(1, n + 1), repeat=p.l))
    cols = list(itertools.product(range(1, n + 1), repeat=p.k))
    return [[delta_oracle(p, a, b) for a in cols] for b in rows]


def relation_oracle(p: Partition, u: list[list[Fraction]]):
    """First (alpha, beta, lhs, rhs) violating R(p) in lexicographic order, or None."""
    n = len(u)
    idx = range(1, n + 1)
    for alpha in itertools.product(idx, repeat=p.k):
        for beta in itertools.product(idx, repeat=p.l):
            lhs = Fraction(0)
            for gamma in itertools.product(idx, repeat=p.k):
                if delta_oracle(p, gamma, beta):
                    lhs += math.prod((u[g - 1][a - 1] for g, a in zip(gamma, alpha)), start=Fraction(1))
            rhs = Fraction(0)
            for gamma in itertools.product(idx, repeat=p.l):
                if delta_oracle(p, alpha, gamma):
                    rhs += math.prod((u[b - 1][g - 1] for b, g in zip(beta, gamma)), start=Fraction(1))
            if lhs != rhs:
                return alpha, beta, lhs, rhs
    return None


def all_set_partitions(items: list) -> list[list[list]]:
    if not items:
        return [[]]
    first, rest = items[0], items[1:]
    out = []
    for part in all_set_partitions(rest):
        out.append([[first]] + part)
        for i in range(len(part)):
            out.append(part[:i] + [[first] + part[i]] + part[i + 1 :])
    return out


def all_partitions_oracle(k: int, l: int) -> set[frozenset]:
    return {frozenset(frozenset(b) for b in sp) for sp in all_set_partitions(_points(Partition(k, l, (0,) * (k + l))))}


def ncm_oracle(p: Partition, m: int) -> bool:
    if not noncrossing_oracle(p):
        return False
    for b in p.blocks:
        up = sum(pt.row is Row.UPPER for pt in b)
        low = len(b) - up
        if m == 0:
            if up != low:
                return False
        elif (up - low) % m:
            return False
    return True
