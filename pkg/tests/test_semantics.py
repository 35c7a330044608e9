import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psiforge.canonical import canonical
from psiforge.dcr import make_dcr
from psiforge.dcrpsi import DCR_PSI, DcrAssertion, X_VARS, dcrpsi, event_process
from psiforge.eventpsi import EVENT_PSI, EvCondition, espsi
from psiforge.events import make_es
from psiforge.pi import make_pi_instance
from psiforge.process import (
    Assert,
    Bang,
    Case,
    Frame,
    In,
    Input,
    MalformedProcess,
    Nil,
    Out,
    Output,
    Par,
    Restrict,
    Tau,
    free_names,
    par,
)
from psiforge.semantics import Budget, BudgetExceeded, frame, substitute, transitions
from psiforge.terms import Var

PI = make_pi_instance()
x, X = Var("x"), Var("X")


def canon_set(inst, steps):
    return {(a if not isinstance(a, Out) else (a.channel, len(a.bound)), canonical(q, inst)) for a, q in steps}


# small pi processes over names a, b with one pattern variable per input
def pi_procs(depth=3):
    names = st.sampled_from(["a", "b"])
    leaf = st.just(Nil())

    def extend(inner):
        return st.one_of(
            st.builds(Output, names, names, inner),
            st.builds(lambda m, c: Input(m, (x,), x, c), names, inner),
            st.builds(Par, inner, inner),
            st.builds(Restrict, names, inner),
        )

    return st.recursive(leaf, extend, max_leaves=6)


class TestProcessSyntax:
    def test_pattern_vars_distinct(self):
        with pytest.raises(MalformedProcess):
            Input("a", (x, x), (x, x), Nil())

    def test_pattern_vars_occur(self):
        with pytest.raises(MalformedProcess):
            Input("a", (x,), "b", Nil())

    def test_par_empty_is_nil(self):
        assert par() == Nil()


class TestFrame:
    def test_event_psi_example(self):
        p = Par(Assert(frozenset({"a"})), Case(((EvCondition(frozenset(), frozenset()), Nil()),)))
        assert frame(EVENT_PSI, p) == Frame((), frozenset({"a"}))

    def test_nil(self):
        assert frame(EVENT_PSI, Nil()) == Frame((), frozenset())

    def test_single_binder(self):
        assert frame(EVENT_PSI, Restrict("a", Assert(frozenset({"a"})))) == Frame(("a",), frozenset({"a"}))

    def test_guarded_assertions_invisible(self):
        p = Par(Output("a", "a", Assert(frozenset({"a"}))), Bang(Assert(frozenset({"b"}))))
        assert frame(EVENT_PSI, p).assertion == frozenset()

    def test_binder_collision_freshened(self):
        p = Par(Restrict("a", Assert(frozenset({"a"}))), Restrict("a", Assert(frozenset({"a"}))))
        f = frame(EVENT_PSI, p)
        assert len(f.bound) == 2 and len(set(f.bound)) == 2
        assert f.assertion == frozenset(f.bound)

    @given(st.frozensets(st.sampled_from("abcd")), st.frozensets(st.sampled_from("abcd")))
    def test_par_composes(self, s, t):
        p, q = Assert(s), Assert(t)
        assert frame(EVENT_PSI, Par(p, q)).assertion == EVENT_PSI.compose(frame(EVENT_PSI, p).assertion, t)


class TestSubstitute:
    def test_plain(self):
        assert substitute(Output("m", X, Nil()), {X: "a"}) == Output("m", "a", Nil())

    def test_capture_avoided(self):
        got = substitute(Restrict("a", Output("m", X, Nil())), {X: "a"})
        assert isinstance(got, Restrict) and got.name != "a"
        assert got.body == Output("m", "a", Nil())

    def test_unbound_pass_through(self):
        p = Output("m", X, Nil())
        assert substitute(p, {Var("Y"): "a"}) == p

    def test_dcr_continuation(self):
        g = make_dcr("e", excludes=[("e", "e")])
        case = event_process(g, "e").body
        receive = case.branches[0][1]
        quad = DcrAssertion(frozenset(), frozenset(), frozenset({"e"}), 0)
        got = substitute(receive.cont, dict(zip(X_VARS, quad)))
        want = DcrAssertion(frozenset({"e"}), frozenset(), frozenset(), 1)
        assert got == Par(Output("m", want, Nil()), Assert(want))


class TestTransitions:
    def test_nil(self):
        assert transitions(PI, PI.unit, Nil()) == set()

    def test_single_event(self):
        es = make_es(["a"])
        steps = transitions(EVENT_PSI, frozenset(), espsi(es))
        assert steps == {(Out("a", (), "a"), Assert(frozenset({"a"})))}

    def test_pi_com(self):
        p = Par(Output("a", "b", Nil()), Input("a", (x,), x, Output(x, x, Nil())))
        taus = [q for a, q in transitions(PI, PI.unit, p) if isinstance(a, Tau)]
        assert taus == [Par(Nil(), Output("b", "b", Nil()))]

    def test_input_is_symbolic(self):
        p = Input("a", (x,), x, Nil())
        assert transitions(PI, PI.unit, p) == {(In("a", x), Nil())}

    def test_case_needs_entailment(self):
        guarded = Case(((EvCondition(frozenset({"a"}), frozenset()), Output("b", "b", Nil())),))
        assert transitions(EVENT_PSI, frozenset(), guarded) == set()
        assert transitions(EVENT_PSI, frozenset({"a"}), guarded)

    def test_par_uses_sibling_frame(self):
        guarded = Case(((EvCondition(frozenset({"a"}), frozenset()), Output("b", "b", Nil())),))
        steps = transitions(EVENT_PSI, frozenset(), Par(Assert(frozenset({"a"})), guarded))
        assert [a for a, _ in steps] == [Out("b", (), "b")]

    def test_scope_extrusion(self):
        p = Par(Restrict("c", Output("a", "c", Nil())), Input("a", (x,), x, Output(x, "b", Nil())))
        outs = [a for a, _ in transitions(PI, PI.unit, p) if isinstance(a, Out)]
        assert outs and outs[0].bound == (outs[0].payload,)
        (tau,) = [q for a, q in transitions(PI, PI.unit, p) if isinstance(a, Tau)]
        assert isinstance(tau, Restrict)
        assert "c" not in free_names(tau)

    def test_restricted_channel_blocked(self):
        assert transitions(PI, PI.unit, Restrict("a", Output("a", "b", Nil()))) == set()

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            transitions(PI, PI.unit, Bang(Bang(Output("a", "a", Nil()))), unfold=2, budget=Budget(1))

    @settings(max_examples=60, deadline=None)
    @given(pi_procs())
    def test_rep_unfolds_once(self, p):
        lhs = transitions(PI, PI.unit, Bang(p), unfold=1)
        rhs = transitions(PI, PI.unit, Par(p, Bang(p)), unfold=0)
        assert canon_set(PI, lhs) == canon_set(PI, rhs)

    @settings(max_examples=60, deadline=None)
    @given(pi_procs())
    def test_deterministic(self, p):
        assert transitions(PI, PI.unit, p) == transitions(PI, PI.unit, p)

    @settings(max_examples=60, deadline=None)
    @given(pi_procs())
    def test_pi_never_changes_environment(self, p):
        for _, q in transitions(PI, PI.unit, p):
            assert frame(PI, q).assertion == PI.unit

    def test_dcr_one_step(self):
        g = make_dcr("e", excludes=[("e", "e")])
        steps = transitions(DCR_PSI, DCR_PSI.unit, dcrpsi(g))
        taus = [q for a, q in steps if isinstance(a, Tau)]
        assert len(taus) == 1
        assert frame(DCR_PSI, taus[0]).assertion == DcrAssertion(frozenset({"e"}), frozenset(), frozenset(), 1)
