import random

from hypothesis import given, settings
from hypothesis import strategies as st

from psiforge.dcr import dcr_enabled, make_dcr, marking, markings_by_depth
from psiforge.dcrpsi import (
    DCR_PSI,
    UNIT,
    DcrAssertion,
    DcrCondition,
    count_outputs,
    dcr_compose,
    dcr_entails,
    dcrpsi,
    event_guard,
    explore_dcrpsi,
    frame_assertion,
    pending_payloads,
)
from psiforge.generators import random_dcr, random_marking
from psiforge.process import Assert, Nil, Output, Par, Tau, par_components
from psiforge.semantics import transitions

SEEDS = st.integers(0, 10_000)
E = frozenset


def quad(ex="", re="", inc="", gen=0):
    return DcrAssertion(E(ex), E(re), E(inc), gen)


class TestCompose:
    def test_newer_wins(self):
        assert dcr_compose(quad(), quad("e", "", "e", 2)) == quad("e", "", "e", 2)

    def test_tie_unites(self):
        assert dcr_compose(quad("a", gen=1), quad("", "b", gen=1)) == quad("a", "b", "", 1)

    def test_unit(self):
        a = quad("a", "b", "c", 3)
        assert dcr_compose(a, UNIT) == a

    @given(st.tuples(*[st.frozensets(st.sampled_from("abc"))] * 3, st.integers(0, 3)))
    def test_unit_is_identity_for_all_generations(self, t):
        a = DcrAssertion(*t)
        assert dcr_compose(UNIT, a) == a


class TestEntails:
    def test_formula(self):
        assert dcr_entails(quad("a", "", "ae", 1), DcrCondition(E("a"), E(), "e"))
        assert not dcr_entails(quad(), DcrCondition(E(), E(), "e"))

    @settings(max_examples=200)
    @given(SEEDS, st.integers(0, 4))
    def test_matches_enabledness(self, seed, gen):
        rng = random.Random(seed)
        g = random_dcr(rng, 5)
        m = random_marking(rng, g)
        for e in g.events:
            assert dcr_entails(DcrAssertion(*m, gen), event_guard(g, e)) == dcr_enabled(g, m, e)


class TestEncoding:
    def test_self_excluding(self):
        g = make_dcr("e", excludes=[("e", "e")])
        (q,) = [q for a, q in transitions(DCR_PSI, UNIT, dcrpsi(g)) if isinstance(a, Tau)]
        assert frame_assertion(q) == quad("e", "", "", 1)

    def test_empty(self):
        g = make_dcr([])
        p = dcrpsi(g, marking())
        assert p == Par(Assert(UNIT), Output("m", UNIT, Nil()))
        assert not [a for a, _ in transitions(DCR_PSI, UNIT, p) if isinstance(a, Tau)]

    def test_response(self):
        g = make_dcr("ef", responses=[("e", "f")])
        lts = explore_dcrpsi(g, max_depth=1)
        after = {frame_assertion(s).responses for s in lts.states[1:]}
        assert E("f") in after

    def test_initial_frame(self):
        g = make_dcr("ab", conditions=[("a", "b")])
        m = marking("a", "b", "ab")
        assert frame_assertion(dcrpsi(g, m)) == DcrAssertion(*m, 0)

    def test_count_outputs(self):
        assert count_outputs(dcrpsi(make_dcr("ab"))) == 1
        assert count_outputs(Nil()) == 0

    @settings(max_examples=25, deadline=None)
    @given(SEEDS)
    def test_reachable_states(self, seed):
        rng = random.Random(seed)
        g = random_dcr(rng, 4, 0.3)
        m = random_marking(rng, g)
        lts = explore_dcrpsi(g, m, max_depth=5)
        layers = markings_by_depth(g, m, 5)
        for s, d in zip(lts.states, lts.depth):
            fr = frame_assertion(s)
            assert count_outputs(s) == 1
            assert pending_payloads(s) == [fr]
            assert fr.generation == d
            assert fr.marking() in layers[d]
            gens = [q.assertion.generation for q in par_components(s) if isinstance(q, Assert)]
            assert gens.count(d) == 1

    def test_stale_assertions_kept(self):
        g = make_dcr("e")
        lts = explore_dcrpsi(g, max_depth=3)
        last = lts.states[-1]
        gens = sorted(q.assertion.generation for q in par_components(last) if isinstance(q, Assert))
        assert gens == [0, 1, 2, 3]
