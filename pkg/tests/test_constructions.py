import json

import pytest
from hypothesis import assume, given, strategies as st

from conftest import lower_partitions, partitions
from oracles import blocks_from_lists, point_blocks
from partcalc import constructions as cons
from partcalc import partition as pc
from partcalc import terms as tm
from partcalc.closure import ALL, enumerate_slice, ncm
from partcalc.errors import NotAProjection, PreconditionError, RangeError, VerificationFailed
from partcalc.partition import COPAIR, CROSSLINE, DOWN1, EMPTY, FOURBLOCK, ID, PAIR, UP1, L, Partition, U

FIGURE_P = pc.partition_from_text("P(0,7)#{1,4,6,7}{2}{3,5}")


def nest_oracle(p: Partition, q: Partition, gap: int) -> frozenset:
    shift = lambda j: j if j <= gap else j + q.l
    out = [frozenset(L(shift(pt.index)) for pt in b) for b in p.blocks]
    out += [frozenset(L(pt.index + gap) for pt in b) for b in q.blocks]
    return frozenset(out)


def restriction_refines(q: Partition, r: Partition, a: int) -> bool:
    """Every pair of window points joined in q stays joined in r (indices shifted by a)."""
    width = r.k
    pts = [U(i) for i in range(1, width + 1)] + [L(j) for j in range(1, width + 1)]
    up = lambda pt: type(pt)(pt.row, pt.index + a)
    return all(r.same_block(x, y) for x in pts for y in pts if q.same_block(up(x), up(y)))


class TestTerms:
    def test_sugar_and_values(self):
        a, b = tm.source(PAIR), tm.source(COPAIR)
        assert (a @ a).value == pc.tensor(PAIR, PAIR)
        t = a >> b  # copair below pair
        assert t.value == EMPTY and t.loops == 1

    def test_units_dropped(self):
        assert tm.tensor(tm.identity_power(0), tm.source(PAIR)).value == PAIR
        assert tm.power(tm.source(PAIR), 0).value == EMPTY
        assert tm.identity_power(5).value == pc.identity(5)

    @given(partitions(3, 3), partitions(3, 3))
    def test_dual_is_involution(self, p, q):
        t = tm.reflect(tm.tensor(tm.source(p), tm.involute(tm.source(q))))
        assert t.dual().value == pc.involute(t.value)
        assert not ({s.op for s in t.dual().trace().steps} & {"involute"})

    def test_trace_replay_and_json(self):
        c = cons.multi_nest(pc.b(3), 1, 3)
        assert c.trace.replay() == c.result
        data = json.loads(c.trace.to_json())
        assert data["result"] == pc.format_partition(c.result)
        assert c.trace.ops_used() <= tm.REPLAY_OPS
        assert c.trace.to_text().splitlines()[-1].startswith(f"step {len(c.trace.steps)}:")

    def test_replay_detects_tampering(self):
        steps = list(cons.nest(PAIR, PAIR, 1).trace.steps)
        last = steps[-1]
        steps[-1] = tm.Step(last.op, last.operands, pc.tensor(PAIR, PAIR), last.removed_loops)
        with pytest.raises(VerificationFailed):
            tm.ConstructionTrace(tuple(steps)).replay()

    def test_replay_rejects_foreign_sources(self):
        tr = cons.nest(PAIR, PAIR, 1).trace
        with pytest.raises(VerificationFailed):
            tr.replay(allowed_sources={ID})
        assert tr.replay(allowed_sources={ID, PAIR}) == cons.nest(PAIR, PAIR, 1).result

    def test_replay_rejects_undeclared_operands(self):
        tr = tm.ConstructionTrace((tm.Step("tensor", (PAIR, PAIR), pc.tensor(PAIR, PAIR)),))
        with pytest.raises(VerificationFailed):
            tr.replay()

    def test_merge(self):
        a, b = cons.nest(PAIR, PAIR, 1).trace, cons.nest(PAIR, PAIR, 0).trace
        merged = tm.merge_traces([a, b])
        assert len({s.result for s in merged.steps}) == len(merged.steps)
        assert merged.replay() == b.result


class TestNesting:
    def test_examples(self):
        assert point_blocks(cons.nest(PAIR, PAIR, 1).result) == blocks_from_lists(lower=[[1, 4], [2, 3]])
        assert cons.nest(pc.b(3), EMPTY, 2).result == pc.b(3)
        assert point_blocks(cons.nest(pc.b(3), pc.b(3), 1).result) == blocks_from_lists(lower=[[1, 5, 6], [2, 3, 4]])

    def test_multi_nest_figure(self):
        r = cons.multi_nest(pc.b(3), 1, 4).result
        assert point_blocks(r) == blocks_from_lists(lower=[[1, 11, 12], [2, 9, 10], [3, 7, 8], [4, 5, 6]])

    def test_multi_nest_small(self):
        assert cons.multi_nest(CROSSLINE, 2, 1).result == CROSSLINE
        assert cons.multi_nest(PAIR, 1, 2).result == cons.nest(PAIR, PAIR, 1).result

    @given(lower_partitions(4, 0), lower_partitions(3, 0), st.integers(0, 4))
    def test_nest_oracle(self, p, q, gap):
        assume(gap <= p.l)
        c = cons.nest(p, q, gap)
        assert point_blocks(c.result) == nest_oracle(p, q, gap)
        assert c.trace.replay() == c.result

    @given(lower_partitions(3), st.integers(1, 3), st.integers(1, 4))
    def test_multi_nest_oracle(self, p, s, m):
        assume(s <= p.l)
        expected = p
        for _ in range(m - 1):
            expected = pc.canonicalize(nest_oracle(p, expected, s), 0, p.l + expected.l)
        assert cons.multi_nest(p, s, m).result == expected

    def test_range_errors(self):
        with pytest.raises(RangeError):
            cons.nest(PAIR, PAIR, 3)
        with pytest.raises(RangeError):
            cons.multi_nest(PAIR, 3, 2)
        with pytest.raises(PreconditionError):
            cons.nest(COPAIR, PAIR, 0)


class TestRotation:
    def test_figure_triple(self):
        weak = cons.weak_line_rotate(FIGURE_P, DOWN1).result
        strong = cons.line_rotate(FIGURE_P, COPAIR).result
        assert point_blocks(weak) == blocks_from_lists(lower=[[3, 5, 6], [1], [2, 4], [7]])
        assert point_blocks(strong) == blocks_from_lists(lower=[[3, 5, 6, 7], [1], [2, 4]])

    def test_small_examples(self):
        assert cons.line_rotate(PAIR, COPAIR).result == PAIR
        for q in (DOWN1, COPAIR, pc.involute(pc.b(3)), pc.tensor(DOWN1, DOWN1)):
            assert cons.weak_line_rotate(UP1, q).result == UP1

    def test_all_singleton_eater_refused(self):
        with pytest.raises(PreconditionError):
            cons.line_rotate(PAIR, pc.tensor(DOWN1, DOWN1))

    @given(lower_partitions(6), partitions(4, 0, min_k=1))
    def test_weak_clause_pointwise(self, p, q):
        for left in (False, True):
            r = cons.weak_line_rotate(p, q, left=left).result
            base, got = (p, r) if not left else (pc.reflect(p), pc.reflect(r))
            assert cons.is_weak_line_rotation(base, got)

    @given(lower_partitions(6), partitions(4, 0, min_k=1))
    def test_strong_equals_cyclic_rotation(self, p, q):
        assume(not pc.is_all_singletons(pc.involute(q)))
        c = cons.line_rotate(p, q)
        assert cons.is_line_rotation(p, c.result)
        # the two clauses pin the result down completely
        assert c.result == cons.cyclic_rotation(p, 1)
        assert c.trace.replay(allowed_sources={ID, p, q, pc.involute(q)}) == c.result

    def test_cyclic_rotation_oracle(self):
        assert cons.cyclic_rotation(FIGURE_P, 1) == pc.partition_from_text("P(0,7)#{3,5,6,7}{1}{2,4}")
        assert cons.cyclic_rotation(FIGURE_P, 7) == FIGURE_P

    @given(lower_partitions(6))
    def test_rotate_until_attached(self, p):
        assume(not pc.is_all_singletons(p))
        t, r = cons.rotate_until_attached(tm.source(p))
        low = t.value.lower_labels
        assert low.count(low[0]) > 1
        assert t.value == cons.cyclic_rotation(p, r)


class TestDoubling:
    def test_shifted_examples(self):
        assert cons.shifted_doubling(PAIR, 1).result == ID
        assert cons.shifted_doubling(pc.b(4), 2).result == FOURBLOCK
        assert cons.shifted_doubling(pc.tensor(PAIR, PAIR), 2).result == pc.tau(2)
        with pytest.raises(RangeError):
            cons.shifted_doubling(PAIR, 3)

    def test_partial_examples(self):
        assert cons.partial_doubling(CROSSLINE, 3).result == pc.tau(3)
        assert cons.partial_doubling(pc.b(3), 2).result == FOURBLOCK
        with pytest.raises(PreconditionError):
            cons.partial_doubling(pc.tensor(UP1, UP1), 1)

    def test_partial_doubling_projection_exhaustive(self):
        for p in enumerate_slice(ALL, 5):
            if p.k or p.l == 0 or pc.is_all_singletons(p):
                continue
            for s in range(1, p.l + 1):
                c = cons.partial_doubling(p, s)
                q = c.result
                assert (q.k, q.l) == (s, s)
                assert pc.involute(q) == q and pc.compose(q, q).result == q
                assert cons.projection_symmetry_check(q)
                assert c.trace.replay(allowed_sources={ID, p, pc.involute(p)}) == q

    def test_projection_symmetry_examples(self):
        assert cons.projection_symmetry_check(pc.sigma(3))
        assert cons.projection_symmetry_check(pc.tau(3))
        assert cons.projection_symmetry_check(ID)
        with pytest.raises(NotAProjection):
            cons.projection_symmetry_check(CROSSLINE)


class TestRestriction:
    def test_examples(self):
        r = cons.weak_restriction(pc.sigma(4), PAIR, COPAIR, 1, 2).result
        assert (r.k, r.l) == (1, 1)
        r = cons.weak_restriction(pc.tau(3), PAIR, COPAIR, 1, 3).result
        assert (r.k, r.l) == (2, 2) and restriction_refines(pc.tau(3), r, 1)
        assert cons.weak_restriction(pc.sigma(4), PAIR, COPAIR, 0, 4).result == pc.sigma(4)

    def test_range(self):
        with pytest.raises(RangeError):
            cons.weak_restriction(pc.sigma(4), PAIR, COPAIR, 2, 2)
        with pytest.raises(RangeError):
            cons.weak_restriction(pc.sigma(4), UP1, DOWN1, 3, 4)

    @given(st.integers(1, 4).flatmap(lambda s: partitions(s, s, min_k=s, min_l=s)), st.data())
    def test_window_connections_survive(self, q, data):
        s = q.k
        a = data.draw(st.integers(0, s - 1))
        b = data.draw(st.integers(a + 1, s))
        r = cons.weak_restriction(q, pc.b(3), pc.involute(pc.b(3)), a, b).result
        assert (r.k, r.l) == (b - a, b - a)
        assert restriction_refines(q, r, a)


class TestGraded:
    def test_m_rotation_examples(self):
        assert cons.m_rotation(pc.involute(pc.b(3)), 3).result == FOURBLOCK
        assert cons.m_rotation(ID, 1).result == UP1
        with pytest.raises(PreconditionError):
            cons.m_rotation(PAIR, 3)

    def test_m_rotation_keeps_grading(self):
        for p in enumerate_slice(ncm(3), 5):
            if p.k:
                r = cons.m_rotation(p, 3).result
                assert (r.k, r.l) == (p.k - 1, p.l + 2)
                assert pc.in_ncm(r, 3)

    def test_single_blocks_from_generators(self):
        words = cons.GeneratorWords(3)
        sources = {ID, pc.b(3), pc.involute(pc.b(3))}
        for a in range(7):
            for b in range(7 - a):
                if a + b == 0 or (a - b) % 3:
                    continue
                t = words.single_block(a, b)
                assert t.value == Partition(a, b, (0,) * (a + b)), (a, b)
                assert t.trace().replay(allowed_sources=sources) == t.value

    def test_every_ncm_member_has_a_word(self):
        for m in (3, 4):
            words = cons.GeneratorWords(m)
            sources = {ID, pc.b(m), pc.involute(pc.b(m))}
            for p in enumerate_slice(ncm(m), 6):
                t = words.word(p)
                assert t.value == p
                assert t.trace().replay(allowed_sources=sources) == p

    def test_word_refuses_non_members(self):
        with pytest.raises(PreconditionError):
            cons.GeneratorWords(3).word(PAIR)
        with pytest.raises(RangeError):
            cons.GeneratorWords(2)
