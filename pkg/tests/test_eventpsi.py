import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psiforge.canonical import canonical
from psiforge.checks import negative_cases, shape_valid_corpus
from psiforge.eventpsi import (
    EVENT_PSI,
    EvCondition,
    InvalidConfiguration,
    ShapeError,
    check_diamond,
    espsi,
    espsi_inverse,
    ev_entails,
    event_process,
    reachable_diamond,
    refine_psi,
    validate_es_shape,
)
from psiforge.events import MissingLabel, concurrent, configurations, identity_refinement, make_es, refine_es
from psiforge.generators import random_es
from psiforge.process import Assert, Case, Nil, Output, Par, par
from psiforge.semantics import frame

SEEDS = st.integers(0, 10_000)
E = frozenset


def cond(causes="", conflicts=""):
    return EvCondition(E(causes), E(conflicts))


class TestEntails:
    def test_formula(self):
        assert ev_entails(E("a"), cond("a", "b"))
        assert not ev_entails(E("b"), cond("a"))
        assert not ev_entails(E("ab"), cond("a", "b"))

    def test_instance_operations(self):
        assert EVENT_PSI.unit == E()
        assert EVENT_PSI.compose(E("a"), E("b")) == E("ab")


class TestEncode:
    def test_causal_pair(self):
        es = make_es("ab", [("a", "b")])
        assert espsi(es) == Par(event_process("a", cond()), event_process("b", cond("a")))
        assert event_process("a", cond()) == Case(((cond(), Output("a", "a", Assert(E("a")))),))

    def test_executed(self):
        assert espsi(make_es("a"), E("a")) == Assert(E("a"))

    def test_conflict_guards(self):
        es = make_es("ab", conflict=[("a", "b")])
        assert espsi(es) == Par(event_process("a", cond("", "b")), event_process("b", cond("", "a")))

    def test_empty_structure(self):
        assert espsi(make_es([])) == Nil()

    def test_invalid_configuration(self):
        with pytest.raises(InvalidConfiguration):
            espsi(make_es("ab", [("a", "b")]), E("b"))

    @settings(max_examples=60)
    @given(SEEDS)
    def test_frame_is_configuration(self, seed):
        es = random_es(random.Random(seed), 6)
        for c in configurations(es):
            assert frame(EVENT_PSI, espsi(es, c)).assertion == c


class TestShape:
    def test_multiples(self):
        v = validate_es_shape(Par(Assert(E("a")), Assert(E("a"))))
        assert v.rule == "3"

    def test_asymmetric_conflict(self):
        p = Par(event_process("a", cond("", "b")), event_process("b", cond()))
        assert validate_es_shape(p).rule == "1"

    def test_self_cause(self):
        assert validate_es_shape(event_process("a", cond("a"))).rule == "2"

    def test_two_branches(self):
        body = Output("a", "a", Assert(E("a")))
        assert validate_es_shape(Case(((cond(), body), (cond(), body)))).rule == "grammar"

    def test_unknown_event_in_guard(self):
        assert validate_es_shape(event_process("a", cond("z"))).rule == "unknown-event"

    def test_heredity(self):
        # a < b and a # c, but b and c are not in conflict
        p = par(event_process("a", cond("", "c")), event_process("b", cond("a")), event_process("c", cond("", "a")))
        assert validate_es_shape(p).rule == "heredity"

    def test_inverse_rejects(self):
        with pytest.raises(ShapeError):
            espsi_inverse(Par(Assert(E("a")), Assert(E("a"))))

    def test_inverse_example(self):
        es = make_es("ab", [("a", "b")])
        for c in configurations(es):
            got, c2 = espsi_inverse(espsi(es, c))
            assert c2 == c and got.events == es.events
        got, _ = espsi_inverse(espsi(es))
        assert got.causes == es.causes

    @settings(max_examples=60)
    @given(SEEDS)
    def test_espsi_output_valid(self, seed):
        es = random_es(random.Random(seed), 6)
        for c in configurations(es):
            assert validate_es_shape(espsi(es, c)) is None

    @settings(max_examples=30, deadline=None)
    @given(SEEDS)
    def test_roundtrip_on_mutated(self, seed):
        for p in shape_valid_corpus(seed, 5):
            es, c = espsi_inverse(p)
            assert canonical(espsi(es, c), EVENT_PSI) == canonical(p, EVENT_PSI)

    @pytest.mark.parametrize("rule", ["1", "2", "3"])
    def test_negative_cases_detected(self, rule):
        for p in negative_cases(rule, 11):
            assert validate_es_shape(p).rule == rule


class TestRefinePsi:
    def test_single_event(self):
        es = make_es(["a"], labels={"a": "l"})
        got = refine_psi(espsi(es), {"l": make_es("uv", [("u", "v")])}, es.label_map())
        assert got == Par(event_process("a.u", cond()), event_process("a.v", cond(["a.u"])))

    def test_identity(self):
        es = make_es("ab", [("a", "b")])
        got = refine_psi(espsi(es), identity_refinement(es), es.label_map())
        assert got == Par(event_process("a.a", cond()), event_process("b.b", cond(["a.a"])))

    def test_conflict_instance(self):
        es = make_es("ab", conflict=[("a", "b")], labels={"a": "l", "b": "m"})
        ref = {"l": make_es("uv", [("u", "v")]), "m": make_es("uw")}
        left = espsi(refine_es(es, ref))
        right = refine_psi(espsi(es), ref, es.label_map())
        assert canonical(left, EVENT_PSI) == canonical(right, EVENT_PSI)

    def test_executed_events_stay_executed(self):
        es = make_es("ab", [("a", "b")])
        got = refine_psi(espsi(es, E("a")), {"a": make_es("u"), "b": make_es("u")})
        assert got == Par(Assert(E(["a.u"])), event_process("b.u", cond(["a.u"])))

    def test_missing_label(self):
        with pytest.raises(MissingLabel):
            refine_psi(espsi(make_es("a")), {})


class TestDiamond:
    def test_concurrent(self):
        assert check_diamond(make_es("ab"), E(), "a", "b")

    def test_causal(self):
        assert not check_diamond(make_es("ab", [("a", "b")]), E(), "a", "b")

    def test_conflict(self):
        assert not check_diamond(make_es("ab", conflict=[("a", "b")]), E(), "a", "b")

    def test_later_configuration(self):
        es = make_es("abc", [("a", "b"), ("a", "c")])
        assert reachable_diamond(es, "b", "c") == E("a")

    def test_invalid_configuration(self):
        with pytest.raises(InvalidConfiguration):
            check_diamond(make_es("ab", [("a", "b")]), E("b"), "a", "b")

    @settings(max_examples=40, deadline=None)
    @given(SEEDS)
    def test_biconditional(self, seed):
        es = random_es(random.Random(seed), 5)
        for e in es.sorted_events():
            for f in es.sorted_events():
                assert concurrent(es, e, f) == (reachable_diamond(es, e, f) is not None)
