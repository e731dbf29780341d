"""
Exact scalar models of the relations R(p).

A concrete n x n matrix u of rationals stands in for the generators u_ij. All
computations are exact: a rational matrix is brought to the form A / d with an
integer matrix A, both sides of a relation are evaluated in integers, and the
two sides (homogeneous of degrees k and l in u) are cross-multiplied by the
matching powers of d before comparison.

Two independent routes decide a relation:

* :func:`check_relation` evaluates the defining sums block by block,
* :func:`check_intertwiner` multiplies the 0/1 matrix T_p against Kronecker
  powers of u.

They must agree on every input.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Sequence

import numpy as np

from . import partition as pc
from .errors import LengthMismatch, ParseError, PreconditionError, ShapeError, Unsupported, VerificationFailed
from .partition import Partition


@dataclass(frozen=True)
class RationalMatrix:
    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if not self.rows or not self.rows[0]:
            raise ShapeError("matrix must have at least one row and one column")
        width = len(self.rows[0])
        if any(len(r) != width for r in self.rows):
            raise ShapeError("ragged matrix")

    @classmethod
    def of(cls, rows: Iterable[Iterable]) -> RationalMatrix:
        return cls(tuple(tuple(Fraction(x) for x in r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> RationalMatrix:
        return cls.of([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def permutation(cls, perm: Sequence[int]) -> RationalMatrix:
        """Matrix with u[perm[j]][j] = 1 (0-based perm)."""
        n = len(perm)
        return cls.of([[int(perm[j] == i) for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    @property
    def n(self) -> int:
        r, c = self.shape
        if r != c:
            raise ShapeError(f"expected a square matrix, got {r}x{c}")
        return r

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.rows[i][j]

    def transpose(self) -> RationalMatrix:
        return RationalMatrix(tuple(zip(*self.rows)))

    def __matmul__(self, other: RationalMatrix) -> RationalMatrix:
        if self.shape[1] != other.shape[0]:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        cols = list(zip(*other.rows))
        return RationalMatrix(tuple(tuple(sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols) for r in self.rows))

    def scale(self, c) -> RationalMatrix:
        c = Fraction(c)
        return RationalMatrix(tuple(tuple(c * x for x in r) for r in self.rows))

    def integer_form(self) -> tuple[np.ndarray, int]:
        """(A, d) with self = A / d, A an object array of Python ints."""
        d = reduce(math.lcm, (x.denominator for r in self.rows for x in r), 1)
        a = np.array([[int(x * d) for x in r] for r in self.rows], dtype=object)
        return a, d

    def to_text(self) -> str:
        r, c = self.shape
        lines = [f"n {r} {c}"]
        lines += [" ".join(str(x) for x in row) for row in self.rows]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> RationalMatrix:
        lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        if not lines:
            raise ParseError("empty matrix file", 0, "n <rows> <cols>")
        head = lines[0].split()
        if len(head) != 3 or head[0] != "n":
            raise ParseError("bad matrix header", 0, "n <rows> <cols>")
        r, c = int(head[1]), int(head[2])
        body = lines[1:]
        if len(body) != r:
            raise ShapeError(f"header announces {r} rows, found {len(body)}")
        rows = []
        for ln in body:
            try:
                row = [Fraction(tok) for tok in ln.split()]
            except (ValueError, ZeroDivisionError) as exc:
                raise ParseError(f"bad rational in row {ln!r}", 0) from exc
            if len(row) != c:
                raise ShapeError(f"row {ln!r} has {len(row)} entries, expected {c}")
            rows.append(row)
        return cls.of(rows)


def rotation_matrix() -> RationalMatrix:
    """The rational rotation [[3/5, -4/5], [4/5, 3/5]]."""
    return RationalMatrix.of([[Fraction(3, 5), Fraction(-4, 5)], [Fraction(4, 5), Fraction(3, 5)]])


def non_orthogonal_example(a) -> RationalMatrix:
    """[[a, 1-a, 0], [1-a, 0, a], [0, a, 1-a]]: row and column sums are 1, yet not orthogonal for a not in {0, 1}."""
    a = Fraction(a)
    return RationalMatrix.of([[a, 1 - a, 0], [1 - a, 0, a], [0, a, 1 - a]])


def random_rational_matrix(n: int, rng: random.Random, max_num: int = 5, max_den: int = 4) -> RationalMatrix:
    return RationalMatrix.of(
        [[Fraction(rng.randint(-max_num, max_num), rng.randint(1, max_den)) for _ in range(n)] for _ in range(n)]
    )


def permutation_matrices(n: int) -> list[RationalMatrix]:
    return [RationalMatrix.permutation(perm) for perm in itertools.permutations(range(n))]


# -- delta and T_p ----------------------------------------------------------


def delta(p: Partition, alpha: Sequence[int], beta: Sequence[int]) -> int:
    """1 iff labelling the upper points by alpha and the lower points by beta is constant on every block."""
    if len(alpha) != p.k or len(beta) != p.l:
        raise LengthMismatch(f"P({p.k},{p.l}) needs |alpha| = {p.k}, |beta| = {p.l}")
    seen: dict[int, int] = {}
    for label, value in zip(p.upper_labels + p.lower_labels, tuple(alpha) + tuple(beta)):
        if seen.setdefault(label, value) != value:
            return 0
    return 1


def _flat(index: Sequence[int], n: int) -> int:
    out = 0
    for i in index:
        out = out * n + (i - 1)
    return out


def _unflat(code: int, n: int, length: int) -> tuple[int, ...]:
    out = []
    for _ in range(length):
        code, r = divmod(code, n)
        out.append(r + 1)
    return tuple(reversed(out))


@dataclass(frozen=True, eq=False)
class SparseTensorMap:
    """The 0/1 matrix of T_p : (C^n)^{⊗k} -> (C^n)^{⊗l}.

    Nonzeros are kept as two aligned arrays of 0-based flat row and column
    indices (first tensor factor most significant), one entry per assignment
    of values to blocks.
    """

    n: int
    p: Partition
    rows: np.ndarray
    cols: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.n**self.p.l, self.n**self.p.k

    @property
    def nnz(self) -> int:
        return len(self.rows)

    @cached_property
    def codes(self) -> np.ndarray:
        """Sorted linear indices row * n^k + col."""
        return np.sort(self.rows * self.shape[1] + self.cols)

    @property
    def nonzeros(self) -> frozenset[tuple[tuple[int, ...], tuple[int, ...]]]:
        """(row multi-index, col multi-index) pairs, 1-based."""
        l, k = self.p.l, self.p.k
        return frozenset(
            (_unflat(int(r), self.n, l), _unflat(int(c), self.n, k)) for r, c in zip(self.rows, self.cols)
        )

    def triplets(self) -> list[tuple[int, int, int]]:
        cols = self.shape[1]
        return [(int(x) // cols, int(x) % cols, 1) for x in self.codes]

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.int64)
        out[self.rows, self.cols] = 1
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseTensorMap):
            return NotImplemented
        return self.n == other.n and self.shape == other.shape and np.array_equal(self.codes, other.codes)

    def __hash__(self) -> int:
        return hash((self.n, self.p))

    def to_text(self) -> str:
        rows, cols = self.shape
        lines = [f"T {pc.format_partition(self.p)} n={self.n} shape={rows}x{cols} nnz={self.nnz}"]
        lines += [f"{r} {c} {v}" for r, c, v in self.triplets()]
        return "\n".join(lines)


def _weights(labels: Sequence[int], n_blocks: int, n: int) -> list[int]:
    """Per block, the flat-index weight contributed by a unit value on that block."""
    w = [0] * n_blocks
    size = len(labels)
    for j, x in enumerate(labels):
        w[x] += n ** (size - 1 - j)
    return w


def t_map(p: Partition, n: int) -> SparseTensorMap:
    """Enumerate T_p by assigning one value to each block (n^{#blocks} nonzeros)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    b = p.n_blocks
    wr = _weights(p.lower_labels, b, n)
    wc = _weights(p.upper_labels, b, n)
    values = np.arange(n, dtype=np.int64)
    rows = np.zeros(1, dtype=np.int64)
    cols = np.zeros(1, dtype=np.int64)
    for blk in range(b):
        rows = np.add.outer(rows, values * wr[blk]).ravel()
        cols = np.add.outer(cols, values * wc[blk]).ravel()
    return SparseTensorMap(n, p, rows, cols)


def kron_power(a: np.ndarray, k: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=a.dtype)
    for _ in range(k):
        out = np.kron(out, a)
    return out


@dataclass(frozen=True)
class TIdentity:
    lhs: np.ndarray
    rhs: np.ndarray
    factor: int


def compose_t_identity(q: Partition, p: Partition, n: int) -> TIdentity:
    """T_q T_p and n^{loops} T_{qp}; raises VerificationFailed if they differ."""
    out = pc.compose(q, p)
    factor = n**out.removed_loops
    lhs = t_map(q, n).to_dense() @ t_map(p, n).to_dense()
    rhs = factor * t_map(out.result, n).to_dense()
    if not np.array_equal(lhs, rhs):
        raise VerificationFailed(f"T_q T_p != n^{out.removed_loops} T_qp for q={q}, p={p}, n={n}")
    return TIdentity(lhs, rhs, factor)


# -- verdicts ---------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    status: str
    alpha: tuple[int, ...] = ()
    beta: tuple[int, ...] = ()
    lhs: Fraction | None = None
    rhs: Fraction | None = None
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.status == "HOLDS"

    def __bool__(self) -> bool:
        return self.holds

    def to_text(self) -> str:
        if self.status == "FAILS":
            a = ",".join(map(str, self.alpha))
            b = ",".join(map(str, self.beta))
            return f"FAILS alpha=({a}) beta=({b}) lhs={self.lhs} rhs={self.rhs}"
        if self.status == "SKIPPED":
            return f"SKIPPED {self.note}".rstrip()
        return "HOLDS"

    def to_dict(self) -> dict:
        out: dict = {"status": self.status}
        if self.status == "FAILS":
            out.update(alpha=list(self.alpha), beta=list(self.beta), lhs=str(self.lhs), rhs=str(self.rhs))
        if self.note:
            out["note"] = self.note
        return out


HOLDS = Verdict("HOLDS")


def _first_failure(lhs: np.ndarray, rhs: np.ndarray, k: int, l: int, d: int) -> Verdict:
    """lhs, rhs indexed [alpha..., beta...], scaled by d^k and d^l respectively."""
    bad = np.argwhere(np.asarray(lhs * d**l != rhs * d**k, dtype=bool))
    if not len(bad):
        return HOLDS
    idx = tuple(int(x) for x in bad[0])
    return Verdict(
        "FAILS",
        tuple(i + 1 for i in idx[:k]),
        tuple(i + 1 for i in idx[k:]),
        Fraction(int(lhs[idx]), d**k),
        Fraction(int(rhs[idx]), d**l),
    )


def _outer(parts: list[np.ndarray], dtype=object) -> np.ndarray:
    return reduce(np.multiply.outer, parts, np.array(1, dtype=dtype))


def _working_form(u: RationalMatrix, p: Partition) -> tuple[np.ndarray, int, np.ndarray]:
    """Integer form of u plus a unit matrix, in int64 when no intermediate can overflow."""
    a, d = u.integer_form()
    n = u.n
    top = max(p.k, p.l)
    m = max(1, max(abs(int(x)) for x in a.flat))
    if n ** (p.k + p.l) * (m * d) ** top < 2**62:
        return a.astype(np.int64), d, np.eye(n, dtype=np.int64)
    return a, d, np.eye(n, dtype=np.int64).astype(object)


def check_relation(p: Partition, u: RationalMatrix) -> Verdict:
    """Evaluate R(p) for the scalar matrix u over all (alpha, beta).

    Both sums factor over the blocks of p: on the left a block with lower
    points pins gamma to the common beta value, a block without lower points
    contributes a free sum; symmetrically on the right. The first failing
    (alpha, beta) in lexicographic order is reported.
    """
    n = u.n
    a, d, unit = _working_form(u, p)
    k, l = p.k, p.l
    left_parts, right_parts, axes = [], [], []
    for block in range(p.n_blocks):
        ups = [i for i, x in enumerate(p.upper_labels) if x == block]
        lows = [j for j, x in enumerate(p.lower_labels) if x == block]
        axes += ups + [k + j for j in lows]
        left = sum(_outer([a[v, :] for _ in ups] + [unit[v] for _ in lows], a.dtype) for v in range(n))
        right = sum(_outer([unit[v] for _ in ups] + [a[:, v] for _ in lows], a.dtype) for v in range(n))
        left_parts.append(np.asarray(left, dtype=a.dtype))
        right_parts.append(np.asarray(right, dtype=a.dtype))
    order = np.argsort(axes)
    lhs = np.transpose(_outer(left_parts, a.dtype), order)
    rhs = np.transpose(_outer(right_parts, a.dtype), order)
    return _first_failure(lhs, rhs, k, l, d)


def check_intertwiner(p: Partition, u: RationalMatrix) -> Verdict:
    """Compare T_p u^{⊗k} with u^{⊗l} T_p entrywise."""
    n = u.n
    a, d, _ = _working_form(u, p)
    k, l = p.k, p.l
    t = t_map(p, n).to_dense().astype(a.dtype)
    lhs = t @ kron_power(a, k)
    rhs = kron_power(a, l) @ t
    # entry [beta, alpha] of both products is one instance of R(p)
    shape = (n,) * (k + l)
    lhs, rhs = lhs.T.reshape(shape), rhs.T.reshape(shape)
    return _first_failure(lhs, rhs, k, l, d)


def check_both(p: Partition, u: RationalMatrix) -> tuple[Verdict, Verdict]:
    """Run both routes; raise VerificationFailed if they disagree."""
    r, t = check_relation(p, u), check_intertwiner(p, u)
    if r != t:
        raise VerificationFailed(f"relation and intertwiner checks disagree for {p}: {r.to_text()} vs {t.to_text()}")
    return r, t


# -- shadows of the Hopf structure ------------------------------------------


def coproduct_shadow_check(p: Partition, u: RationalMatrix, v: RationalMatrix) -> Verdict:
    """If u and v satisfy R(p), so does the product uv."""
    if u.shape != v.shape:
        raise ShapeError("u and v must have the same size")
    if not (check_relation(p, u) and check_relation(p, v)):
        return Verdict("SKIPPED", note="u or v does not satisfy R(p)")
    return check_relation(p, u @ v)


@dataclass(frozen=True)
class AntipodeShadow:
    original: Verdict
    dual: Verdict

    @property
    def consistent(self) -> bool:
        return self.original.holds == self.dual.holds


def antipode_shadow_check(p: Partition, u: RationalMatrix) -> AntipodeShadow:
    """R(p) for u^t is R(p*) for u: compare check_relation(p, u) with check_relation(p*, u^t)."""
    return AntipodeShadow(check_relation(p, u), check_relation(pc.involute(p), u.transpose()))


def right_inverse_witness(p: Partition, u: RationalMatrix) -> RationalMatrix:
    """Build t with u t = 1 from a lower partition whose first point lies in a two-point block.

    The free indices of the other blocks are fixed block by block (1, 2, ...
    cyclically mod n in canonical block order); t_ij then sums over the lower
    labellings consistent with p whose first entry is i.
    """
    if p.k != 0 or p.l < 2:
        raise PreconditionError("the witness needs p in P(0,l), l >= 2")
    low = p.lower_labels
    first_block = [j for j, x in enumerate(low) if x == low[0]]
    if len(first_block) != 2:
        raise Unsupported(
            f"the first point of p lies in a block of size {len(first_block)}; the witness needs a pair"
        )
    r = first_block[1]
    n = u.n
    if not check_relation(p, u):
        raise PreconditionError("u does not satisfy R(p)")
    others = sorted({x for x in low if x != low[0]})
    fixed = {blk: (i % n) + 1 for i, blk in enumerate(others)}
    beta = [fixed.get(x, 0) for x in low]
    t = [[Fraction(0)] * n for _ in range(n)]
    for values in itertools.product(range(1, n + 1), repeat=p.n_blocks):
        gamma = [values[x] for x in low]
        i = gamma[0]
        for j in range(1, n + 1):
            term = Fraction(1)
            for pos in range(1, p.l):
                row = j if pos == r else beta[pos]
                term *= u.rows[row - 1][gamma[pos] - 1]
            t[i - 1][j - 1] += term
    witness = RationalMatrix.of(t)
    if u @ witness != RationalMatrix.identity(n):
        raise VerificationFailed("u t != 1 although u satisfies R(p)")
    return witness
