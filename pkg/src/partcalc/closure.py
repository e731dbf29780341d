"""
Bounded generation of partition categories and orthogonality inference.

Bounded closure is a deterministic breadth-first search: every round applies
tensor, composition, reflection (and involution in Banica-Speicher mode) to the
newly found members against all members, keeping results up to a total point
bound. Each member records the single step that first produced it, so a full
replayable trace can be rebuilt on demand.

Semantic closure layers a small rule pack on top. The rules add partitions
whose presence is implied by operator-algebraic lemmas rather than by partition
calculus; every firing carries a citation that re-verifies its structural
hypotheses.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Iterator, Mapping

from . import partition as pc
from . import terms as tm
from .constructions import Construction, is_projection, line_rotate_term, partial_doubling_term
from .errors import BoundExceeded, ParseError, PreconditionError, VerificationFailed
from .partition import COPAIR, ID, PAIR, Partition, format_partition, partition_from_text
from .terms import ConstructionTrace, Step

TENSOR, COMPOSE, REFLECT, INVOLUTE = "tensor", "compose", "reflect", "involute"
BASE_RULES = frozenset({TENSOR, COMPOSE, REFLECT})


def _key(p: Partition) -> tuple:
    return (p.size, p.k, p.l, p.labels)


# -- configuration and results ----------------------------------------------


@dataclass(frozen=True)
class ClosureConfig:
    max_total_points: int = 6
    max_elements: int = 100_000
    rules: frozenset[str] = BASE_RULES
    semantic_rules: bool = False

    def __post_init__(self):
        if self.max_total_points < 2:
            raise ValueError("max_total_points must be >= 2")
        if not BASE_RULES <= self.rules:
            raise ValueError("tensor, compose and reflect are always enabled")
        if not self.rules <= BASE_RULES | {INVOLUTE}:
            raise ValueError(f"unknown rules: {sorted(self.rules - BASE_RULES - {INVOLUTE})}")

    @property
    def banica_speicher(self) -> bool:
        return INVOLUTE in self.rules

    @classmethod
    def generalized(cls, max_total_points: int = 6, **kw) -> ClosureConfig:
        return cls(max_total_points, rules=BASE_RULES, **kw)

    @classmethod
    def bs(cls, max_total_points: int = 6, **kw) -> ClosureConfig:
        return cls(max_total_points, rules=BASE_RULES | {INVOLUTE}, **kw)

    def to_dict(self) -> dict:
        return {
            "max_total_points": self.max_total_points,
            "max_elements": self.max_elements,
            "rules": sorted(self.rules),
            "semantic_rules": self.semantic_rules,
        }


@dataclass(frozen=True)
class Derivation:
    """The step that first produced a member: a source kind or an operation on earlier members."""

    op: str
    parents: tuple[Partition, ...] = ()
    loops: int = 0

    @property
    def is_source(self) -> bool:
        return self.op not in tm.REPLAY_OPS


@dataclass(frozen=True)
class Citation:
    """A rule-pack firing: which lemma, on which partitions, under which standing hypothesis."""

    rule: str
    lemma: str
    triggers: tuple[Partition, ...]
    added: tuple[Partition, ...]
    witnesses: tuple[Partition, ...] = ()

    def verify(self) -> bool:
        check = _RULE_CHECKS[self.rule]
        if not check(self):
            raise VerificationFailed(f"{self.rule}: hypotheses do not hold on {[str(t) for t in self.triggers]}")
        return True

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "lemma": self.lemma,
            "triggers": [format_partition(p) for p in self.triggers],
            "added": [format_partition(p) for p in self.added],
            "witnesses": [format_partition(p) for p in self.witnesses],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> Citation:
        conv = lambda xs: tuple(partition_from_text(x) for x in xs)
        return cls(d["rule"], d["lemma"], conv(d["triggers"]), conv(d["added"]), conv(d.get("witnesses", ())))


@dataclass
class ClosureResult:
    generators: tuple[Partition, ...]
    config: ClosureConfig
    derivations: dict[Partition, Derivation]
    saturated: bool
    bound_hit: bool
    citations: list[Citation] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def members(self) -> frozenset[Partition]:
        return frozenset(self.derivations)

    def __contains__(self, p: Partition) -> bool:
        return p in self.derivations

    def __len__(self) -> int:
        return len(self.derivations)

    def sorted_members(self) -> list[Partition]:
        return sorted(self.derivations, key=_key)

    def slice(self, k: int, l: int) -> list[Partition]:
        return [p for p in self.sorted_members() if p.k == k and p.l == l]

    def trace_of(self, p: Partition) -> ConstructionTrace:
        """Replayable steps for p, parents before children, each member once."""
        if p not in self.derivations:
            raise KeyError(f"{format_partition(p)} is not a member")
        steps: list[Step] = []
        done: set[Partition] = set()
        todo: list[tuple[Partition, bool]] = [(p, False)]
        while todo:
            x, expanded = todo.pop()
            if x in done:
                continue
            d = self.derivations[x]
            if expanded:
                done.add(x)
                steps.append(Step(d.op, d.parents, x, d.loops))
                continue
            todo.append((x, True))
            todo.extend((y, False) for y in reversed(d.parents))
        return ConstructionTrace(tuple(steps))

    @cached_property
    def trace(self) -> dict[Partition, ConstructionTrace]:
        return {p: self.trace_of(p) for p in self.sorted_members()}

    def allowed_sources(self) -> set[Partition]:
        out = {ID, *self.generators}
        if self.config.banica_speicher:
            out |= {PAIR, COPAIR}
        for c in self.citations:
            out |= set(c.added)
        return out

    def verify(self) -> bool:
        """Replay every member from allowed sources and re-verify all citations."""
        allowed = self.allowed_sources()
        for c in self.citations:
            c.verify()
        for p in self.sorted_members():
            if self.trace_of(p).replay(allowed) != p:
                raise VerificationFailed(f"trace of {format_partition(p)} replays to something else")
        return True

    def to_dict(self) -> dict:
        members = []
        for p in self.sorted_members():
            d = self.derivations[p]
            members.append(
                {
                    "partition": format_partition(p),
                    "op": d.op,
                    "parents": [format_partition(x) for x in d.parents],
                    "loops": d.loops,
                }
            )
        return {
            "generators": [format_partition(p) for p in self.generators],
            "config": self.config.to_dict(),
            "saturated": self.saturated,
            "bound_hit": self.bound_hit,
            "member_count": len(members),
            "members": members,
            "citations": [c.to_dict() for c in self.citations],
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: Mapping) -> ClosureResult:
        try:
            cfg = d["config"]
            config = ClosureConfig(
                cfg["max_total_points"], cfg["max_elements"], frozenset(cfg["rules"]), cfg["semantic_rules"]
            )
            derivations = {}
            for m in d["members"]:
                parents = tuple(partition_from_text(x) for x in m["parents"])
                derivations[partition_from_text(m["partition"])] = Derivation(m["op"], parents, m["loops"])
            return cls(
                tuple(partition_from_text(x) for x in d["generators"]),
                config,
                derivations,
                d["saturated"],
                d["bound_hit"],
                [Citation.from_dict(c) for c in d.get("citations", ())],
                list(d.get("notes", ())),
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed closure report: missing {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> ClosureResult:
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ParseError(f"closure report is not JSON: {exc.msg}", exc.pos) from exc


# -- bounded closure --------------------------------------------------------


def closure(
    generators: Iterable[Partition],
    cfg: ClosureConfig = ClosureConfig(),
    _extra_sources: Mapping[Partition, str] | None = None,
    _resume: ClosureResult | None = None,
) -> ClosureResult:
    """The members of the generated category having at most ``cfg.max_total_points`` points.

    ``_resume`` continues from an earlier result under the same bound: only
    new sources (and, if involution was just enabled, the involutions of old
    members) enter the frontier.
    """
    bound = cfg.max_total_points
    gens = tuple(sorted(set(generators), key=_key))
    derivations: dict[Partition, Derivation] = dict(_resume.derivations) if _resume else {}
    bound_hit = _resume.bound_hit if _resume else False

    seeds: list[tuple[Partition, str]] = [(ID, "identity")]
    if cfg.banica_speicher:
        seeds += [(PAIR, "seed"), (COPAIR, "seed")]
    seeds += [(g, "generator") for g in gens]
    seeds += sorted((_extra_sources or {}).items(), key=lambda kv: _key(kv[0]))
    new: list[Partition] = []
    for p, kind in seeds:
        if p.size > bound:
            bound_hit = True
        elif p not in derivations:
            derivations[p] = Derivation(kind)
            new.append(p)
    if _resume and cfg.banica_speicher and not _resume.config.banica_speicher:
        for x in sorted(_resume.derivations, key=_key):
            y = pc.involute(x)
            if y not in derivations:
                derivations[y] = Derivation(INVOLUTE, (x,))
                new.append(y)

    # members indexed by arity, for composition partners
    by_lower: dict[int, list[Partition]] = {}
    by_upper: dict[int, list[Partition]] = {}

    def index(p: Partition) -> None:
        by_lower.setdefault(p.l, []).append(p)
        by_upper.setdefault(p.k, []).append(p)

    for p in derivations:
        index(p)

    full = False
    while new and not full:
        found: list[Partition] = []

        def offer(p: Partition, d: Derivation) -> bool:
            nonlocal full
            if p in derivations:
                return True
            if len(derivations) >= cfg.max_elements:
                full = True
                return False
            derivations[p] = d
            found.append(p)
            return True

        members = list(derivations)
        for x in new:
            if not offer(pc.reflect(x), Derivation(REFLECT, (x,))):
                break
            if cfg.banica_speicher and not offer(pc.involute(x), Derivation(INVOLUTE, (x,))):
                break
            for y in members:
                if x.size + y.size > bound:
                    bound_hit = True
                else:
                    offer(pc.tensor(x, y), Derivation(TENSOR, (x, y)))
                    offer(pc.tensor(y, x), Derivation(TENSOR, (y, x)))
            # x on top: partners q with q.k == x.l; x below: partners p with p.l == x.k
            for q in list(by_upper.get(x.l, ())):
                if q.l + x.k > bound:
                    bound_hit = True
                    continue
                out = pc.compose(q, x)
                offer(out.result, Derivation(COMPOSE, (q, x), out.removed_loops))
            for p in list(by_lower.get(x.k, ())):
                if x.l + p.k > bound:
                    bound_hit = True
                    continue
                out = pc.compose(x, p)
                offer(out.result, Derivation(COMPOSE, (x, p), out.removed_loops))
            if full:
                break
        for p in found:
            index(p)
        new = found
    if full:
        bound_hit = True
    return ClosureResult(gens, cfg, derivations, saturated=not full, bound_hit=bound_hit)


@dataclass(frozen=True)
class Membership:
    found: bool
    trace: ConstructionTrace | None = None

    @property
    def verdict(self) -> str:
        return "Member" if self.found else "NotFoundWithinBounds"


def membership(p: Partition, result: ClosureResult) -> Membership:
    """Member is definitive; NotFoundWithinBounds is not a proof of non-membership."""
    if p in result:
        return Membership(True, result.trace_of(p))
    return Membership(False)


# -- enumeration ------------------------------------------------------------


class PredicateKind(enum.Enum):
    ALL = "all"
    NONCROSSING = "nc"
    NCM = "ncm"


@dataclass(frozen=True)
class Predicate:
    kind: PredicateKind
    m: int | None = None

    def __call__(self, p: Partition) -> bool:
        if self.kind is PredicateKind.ALL:
            return True
        if self.kind is PredicateKind.NONCROSSING:
            return pc.is_noncrossing(p)
        return pc.in_ncm(p, self.m)

    def __str__(self) -> str:
        return f"ncm:{self.m}" if self.kind is PredicateKind.NCM else self.kind.value

    @classmethod
    def parse(cls, text: str) -> Predicate:
        text = text.strip().lower()
        if text in ("all", "nc"):
            return cls(PredicateKind(text))
        if text.startswith("ncm:"):
            try:
                m = int(text[4:])
            except ValueError:
                m = -1
            if m < 0:
                raise ParseError(f"bad grading in {text!r}", 4, "a non-negative integer")
            return cls(PredicateKind.NCM, m)
        raise ParseError(f"unknown predicate {text!r}", 0, "all, nc or ncm:<m>")


ALL = Predicate(PredicateKind.ALL)
NONCROSSING = Predicate(PredicateKind.NONCROSSING)


def ncm(m: int) -> Predicate:
    return Predicate(PredicateKind.NCM, m)


def bell(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def restricted_growth_strings(n: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    labels = [0] * n

    def rec(i: int, top: int) -> Iterator[tuple[int, ...]]:
        if i == n:
            yield tuple(labels)
            return
        for v in range(top + 2):
            labels[i] = v
            yield from rec(i + 1, max(top, v))

    yield from rec(1, 0)


def enumerate_partitions(pred: Predicate, k: int, l: int, max_elements: int = 1_000_000) -> list[Partition]:
    """All partitions in P(k,l) satisfying pred, by brute force over set partitions."""
    if k < 0 or l < 0:
        raise ValueError("arities must be non-negative")
    if bell(k + l) > max_elements:
        raise BoundExceeded(f"P({k},{l}) has {bell(k + l)} elements, above the limit {max_elements}")
    return [p for p in (Partition(k, l, labels) for labels in restricted_growth_strings(k + l)) if pred(p)]


def enumerate_slice(pred: Predicate, max_total_points: int, max_elements: int = 1_000_000) -> list[Partition]:
    """All partitions with at most max_total_points points satisfying pred."""
    out = []
    for total in range(max_total_points + 1):
        for k in range(total + 1):
            out += enumerate_partitions(pred, k, total - k, max_elements)
    return out


# -- category verification --------------------------------------------------


@dataclass(frozen=True)
class Violation:
    op: str
    operands: tuple[Partition, ...]
    result: Partition

    def to_text(self) -> str:
        args = " ".join(format_partition(p) for p in self.operands)
        return f"{self.op} {args} -> {format_partition(self.result)} missing"


@dataclass(frozen=True)
class CategoryReport:
    max_total_points: int
    size: int
    checked: int
    violation_count: int
    violations: tuple[Violation, ...]

    @property
    def closed(self) -> bool:
        return self.violation_count == 0

    def to_dict(self) -> dict:
        return {
            "max_total_points": self.max_total_points,
            "size": self.size,
            "checked": self.checked,
            "closed": self.closed,
            "violation_count": self.violation_count,
            "violations": [v.to_text() for v in self.violations],
        }


def verify_generalized_category(
    s: Iterable[Partition], max_total_points: int, involution: bool = True, max_witnesses: int = 20
) -> CategoryReport:
    """Check closure of a finite slice under the category operations, within the point bound."""
    members = set(s)
    ordered = sorted(members, key=_key)
    violations: list[Violation] = []
    count = 0
    checked = 0

    def need(op: str, operands: tuple[Partition, ...], result: Partition) -> None:
        nonlocal count, checked
        checked += 1
        if result not in members:
            count += 1
            if len(violations) < max_witnesses:
                violations.append(Violation(op, operands, result))

    if max_total_points >= 2:
        need("identity", (), ID)
    by_lower: dict[int, list[Partition]] = {}
    for p in ordered:
        by_lower.setdefault(p.l, []).append(p)
    for p in ordered:
        need(REFLECT, (p,), pc.reflect(p))
        if involution:
            need(INVOLUTE, (p,), pc.involute(p))
        for q in ordered:
            if p.size + q.size <= max_total_points:
                need(TENSOR, (p, q), pc.tensor(p, q))
        # p below each r with r.l == p.k
        for r in by_lower.get(p.k, ()):
            if p.l + r.k <= max_total_points:
                need(COMPOSE, (p, r), pc.compose(p, r).result)
    return CategoryReport(max_total_points, len(members), checked, count, tuple(violations))


# -- orthogonality classifier -----------------------------------------------


class Case(enum.Enum):
    A = "A_OddLength"
    B = "B_SingletonOddGap"
    C = "C_SingletonEvenGap"
    D = "D_NoSingletonBigBlock"
    E = "E_AllPairs"


class Conclusion(enum.Enum):
    IN_PO = "InPO"
    EVEN_GAP_WITNESS = "ImpliesEvenGapWitness"
    TAU = "ImpliesTau"
    NONE = "None"


_CLAUSE = {
    Case.A: "odd length enforces orthogonality",
    Case.B: "singleton with an odd-gap pair enforces orthogonality",
    Case.C: "singleton with an even-gap pair implies the positioner",
    Case.D: "no singleton and a block of size at least three enforces orthogonality",
    Case.E: "all blocks pairs implies tau(m); tau(2) enforces orthogonality",
}


@dataclass(frozen=True)
class OrthoClassification:
    p: Partition
    cases: frozenset[Case]
    conclusion: Conclusion
    m: int | None = None

    def case_labels(self) -> list[str]:
        out = []
        for c in Case:
            if c in self.cases:
                out.append(f"E({self.m})" if c is Case.E else c.name)
        return out

    @property
    def conclusion_label(self) -> str:
        if self.conclusion is Conclusion.TAU:
            return f"ImpliesTau({self.m})"
        return self.conclusion.value

    @property
    def citation(self) -> str:
        decisive = {
            Conclusion.IN_PO: next(c for c in (Case.A, Case.B, Case.D, Case.E) if c in self.cases)
            if self.cases & {Case.A, Case.B, Case.D, Case.E}
            else None,
            Conclusion.TAU: Case.E,
            Conclusion.EVEN_GAP_WITNESS: Case.C,
        }.get(self.conclusion)
        return _CLAUSE[decisive] if decisive else ""

    def to_text(self) -> str:
        return f"cases=[{','.join(self.case_labels())}] conclusion={self.conclusion_label}"

    def to_dict(self) -> dict:
        return {
            "partition": format_partition(self.p),
            "cases": [c.value + (f"({self.m})" if c is Case.E else "") for c in Case if c in self.cases],
            "conclusion": self.conclusion_label,
            "m": self.m,
            "citation": self.citation,
        }


def _pair_span(a: int, b: int, l: int) -> tuple[int, int]:
    """(span, rotation) for the shorter of the two arcs between lower points a < b on the circle."""
    direct, wrapped = b - a + 1, l - (b - a) + 1
    if direct <= wrapped:
        return direct, a - 1
    return wrapped, b - 1


def all_pairs_span(p: Partition) -> tuple[int, int]:
    """(m, r) for an all-pairs p: the shortest arc spanned by one pair, and the rotation moving it to 1..m."""
    best = None
    for blk in p.blocks:
        a, b = sorted(pt.index for pt in blk)
        cand = _pair_span(a, b, p.l)
        if best is None or cand < best:
            best = cand
    return best


def classify_orthogonality(p: Partition) -> OrthoClassification:
    if p.k != 0:
        raise PreconditionError("the classifier takes lower-only partitions P(0,l)")
    if p.l == 0 or pc.is_all_singletons(p):
        raise PreconditionError("p must not be a tensor power of the singleton")
    census = pc.block_census(p)
    if p.l % 2:
        return OrthoClassification(p, frozenset({Case.A}), Conclusion.IN_PO)
    cases = set()
    m = None
    if census.has_singleton:
        gaps = {t - s for s, t in pc.same_block_pairs(p)}
        if any(g % 2 for g in gaps):
            cases.add(Case.B)
        if any(g % 2 == 0 for g in gaps):
            cases.add(Case.C)
    elif max(census.sizes) >= 3:
        cases.add(Case.D)
    else:
        cases.add(Case.E)
        m, _ = all_pairs_span(p)
    if cases & {Case.B, Case.D} or (Case.E in cases and m == 2):
        conclusion = Conclusion.IN_PO
    elif Case.E in cases:
        conclusion = Conclusion.TAU
    elif Case.C in cases:
        conclusion = Conclusion.EVEN_GAP_WITNESS
    else:
        conclusion = Conclusion.NONE
    return OrthoClassification(p, frozenset(cases), conclusion, m)


def line_rotate_times(p: tm.Term, r: int) -> tm.Term:
    """r line rotations of a lower-only word, eating with its involution."""
    eater = p.dual()
    out = p
    for _ in range(r):
        out = line_rotate_term(out, eater)
    return out


def all_pairs_doubling(p: Partition) -> tuple[int, Construction]:
    """For an all-pairs p: rotate its shortest pair to the legs 1..m, then partially double on m legs."""
    cls = classify_orthogonality(p)
    if Case.E not in cls.cases:
        raise PreconditionError("p must consist of pairs only")
    m, r = all_pairs_span(p)
    t = partial_doubling_term(line_rotate_times(tm.source(p, "generator"), r), m)
    return m, Construction(t.value, t.trace())


# -- semantic rule pack -----------------------------------------------------


def _is_corner_projection(q: Partition) -> bool:
    """q = q* = qq in P(s,s), s >= 2, corners forming one 4-block, every other block a pair."""
    s = q.k
    if s < 2 or q.l != s or not is_projection(q):
        return False
    corners = [pc.U(1), pc.U(s), pc.L(1), pc.L(s)]
    block = next(blk for blk in q.blocks if corners[0] in blk)
    if sorted(block) != sorted(corners):
        return False
    return all(len(blk) == 2 for blk in q.blocks if blk is not block)


def _special_square(q: Partition) -> str | None:
    if q.k == q.l and q.k >= 2:
        if q == pc.pi(q.k):
            return "pi"
        if q == pc.sigma(q.k):
            return "sigma"
    return None


def _has_singleton(p: Partition) -> bool:
    return any(len(blk) == 1 for blk in p.blocks)


def _hypothesis(c: Citation) -> bool:
    lower = any(w.k == 0 and w.l >= 1 for w in c.witnesses)
    upper = any(w.l == 0 and w.k >= 1 for w in c.witnesses)
    return lower and upper


SINGLETON_PAIR = pc.tensor(pc.UP1, pc.UP1)
CO_SINGLETON_PAIR = pc.tensor(pc.DOWN1, pc.DOWN1)


def _check_r1(c: Citation) -> bool:
    q, qs = c.triggers
    return _hypothesis(c) and _special_square(q) is not None and qs == pc.involute(q) and set(c.added) == {PAIR, COPAIR}


def _check_r2(c: Citation) -> bool:
    return _hypothesis(c) and c.triggers == (pc.tau(2),) and set(c.added) == {PAIR, COPAIR}


def _check_r3(c: Citation) -> bool:
    (h,) = c.triggers
    odd = any((w.k == 0 and w.l % 2) or (w.l == 0 and w.k % 2) for w in c.witnesses)
    want = {SINGLETON_PAIR, CO_SINGLETON_PAIR} | ({pc.UP1, pc.DOWN1} if odd else set())
    return _hypothesis(c) and _has_singleton(h) and set(c.added) == want


def _check_r4(c: Citation) -> bool:
    (q,) = c.triggers
    return _hypothesis(c) and _is_corner_projection(q) and set(c.added) == {PAIR, COPAIR}


def _check_r5(c: Citation) -> bool:
    return set(c.triggers) == {PAIR, COPAIR} and not c.added


_RULE_CHECKS = {"R1": _check_r1, "R2": _check_r2, "R3": _check_r3, "R4": _check_r4, "R5": _check_r5}

LEMMAS = {
    "R1": "pi_m and sigma_m enforce orthogonality",
    "R2": "tau_2 enforces orthogonality",
    "R3": "a singleton anywhere yields two singletons on each line, one if some witness has odd length",
    "R4": "a projection with a corner four-block and pairs elsewhere enforces orthogonality",
    "R5": "with pair and copair present the relations are closed under involution",
}


def _fire_rules(members: Iterable[Partition]) -> list[Citation]:
    ordered = sorted(members, key=_key)
    member_set = set(ordered)
    lows = tuple(p for p in ordered if p.k == 0 and p.l >= 1)
    ups = tuple(p for p in ordered if p.l == 0 and p.k >= 1)
    out: list[Citation] = []
    if PAIR in member_set and COPAIR in member_set:
        out.append(Citation("R5", LEMMAS["R5"], (PAIR, COPAIR), ()))
    if not (lows and ups):
        return out
    witnesses = (lows[0], ups[0])
    odd_low = next((w for w in lows if w.l % 2), None)
    odd_up = next((w for w in ups if w.k % 2), None)
    pairs = (PAIR, COPAIR)
    for q in ordered:
        if _special_square(q) and pc.involute(q) in member_set:
            out.append(Citation("R1", LEMMAS["R1"], (q, pc.involute(q)), pairs, witnesses))
            break
    if pc.tau(2) in member_set:
        out.append(Citation("R2", LEMMAS["R2"], (pc.tau(2),), pairs, witnesses))
    h = next((q for q in ordered if _has_singleton(q)), None)
    if h is not None:
        odd = odd_low or odd_up
        added = (SINGLETON_PAIR, CO_SINGLETON_PAIR) + ((pc.UP1, pc.DOWN1) if odd else ())
        wit = witnesses + ((odd,) if odd else ())
        out.append(Citation("R3", LEMMAS["R3"], (h,), added, wit))
    q = next((q for q in ordered if _is_corner_projection(q)), None)
    if q is not None:
        out.append(Citation("R4", LEMMAS["R4"], (q,), pairs, witnesses))
    return out


def semantic_closure(generators: Iterable[Partition], cfg: ClosureConfig = ClosureConfig(semantic_rules=True)) -> ClosureResult:
    """Bounded closure interleaved with the rule pack until no rule adds anything.

    Rules only read members of the current bounded closure; their outputs
    become sources for the next combinatorial round.
    """
    gens = tuple(sorted(set(generators), key=_key))
    cfg = replace(cfg, semantic_rules=True)
    cited: dict[Partition, str] = {}
    citations: list[Citation] = []
    fired: set[str] = set()
    result = None
    while True:
        result = closure(gens, cfg, cited, result)
        progress = False
        for c in _fire_rules(result.members):
            if c.rule == "R5":
                if not cfg.banica_speicher:
                    cfg = replace(cfg, rules=cfg.rules | {INVOLUTE})
                    progress = True
                if "R5" not in fired:
                    citations.append(c)
                    fired.add("R5")
                continue
            fresh = [p for p in c.added if p not in result and p not in cited]
            if fresh:
                citations.append(c)
                for p in fresh:
                    cited[p] = f"rule:{c.rule}"
                progress = True
        if not progress:
            break
    lows = any(p.k == 0 and p.l >= 1 for p in result.members)
    ups = any(p.l == 0 and p.k >= 1 for p in result.members)
    if not (lows and ups):
        result.notes.append("standing hypothesis (members in P(0,l) and P(k,0)) not met; rules R1-R4 disabled")
    result.generators = gens
    result.config = cfg
    result.citations = citations
    return result
