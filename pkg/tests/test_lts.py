from psiforge.canonical import canonical, canonically_equal
from psiforge.dcr import make_dcr
from psiforge.dcrpsi import DCR_PSI, explore_dcrpsi
from psiforge.eventpsi import EVENT_PSI, espsi
from psiforge.events import make_es
from psiforge.lts import explore
from psiforge.pi import make_pi_instance
from psiforge.process import Assert, Input, Nil, Output, Par, Restrict, Tau, par
from psiforge.terms import Var

PI = make_pi_instance()


class TestCanonical:
    def test_par_commutative_associative(self):
        a, b, c = (Output(n, n, Nil()) for n in "abc")
        assert canonically_equal(Par(a, Par(b, c)), Par(Par(c, a), b))

    def test_nil_dropped(self):
        a = Output("a", "a", Nil())
        assert canonical(Par(a, Nil())) == canonical(a)

    def test_unit_assertion_is_nil(self):
        assert canonical(Assert(frozenset()), EVENT_PSI) == canonical(Nil(), EVENT_PSI)
        assert canonical(Assert(frozenset())) != canonical(Nil())

    def test_alpha_equivalence(self):
        p = Restrict("a", Output("a", "b", Nil()))
        q = Restrict("c", Output("c", "b", Nil()))
        assert canonically_equal(p, q)
        assert not canonically_equal(p, Restrict("c", Output("a", "b", Nil())))

    def test_input_binders(self):
        x, y = Var("x"), Var("y")
        assert canonically_equal(Input("a", (x,), x, Output(x, x, Nil())), Input("a", (y,), y, Output(y, y, Nil())))

    def test_absorb_needs_instance(self):
        try:
            canonical(Nil(), absorb=True)
        except ValueError:
            return
        raise AssertionError("expected ValueError")

    def test_absorb_drops_redundant_assertions(self):
        p = par(Assert(frozenset({"a"})), Assert(frozenset({"a", "b"})))
        assert canonical(p, EVENT_PSI, absorb=True) == canonical(Assert(frozenset({"a", "b"})), EVENT_PSI)
        assert canonical(p, EVENT_PSI) != canonical(Assert(frozenset({"a", "b"})), EVENT_PSI)


class TestExplore:
    def test_nil(self):
        lts = explore(PI, PI.unit, Nil())
        assert (len(lts.states), len(lts.edges), lts.truncated) == (1, 0, False)

    def test_diamond(self):
        lts = explore(EVENT_PSI, frozenset(), espsi(make_es("ab")))
        assert (len(lts.states), len(lts.edges), lts.truncated) == (4, 4, False)
        assert lts.layers() == {0: [0], 1: [1, 2], 2: [3]}

    def test_dcr_self_excluding_chain(self):
        lts = explore_dcrpsi(make_dcr("e", excludes=[("e", "e")]))
        assert len(lts.states) == 2
        assert [type(a) for _, a, _ in lts.edges] == [Tau]
        assert not lts.truncated

    def test_truncation_flag(self):
        lts = explore(PI, PI.unit, Output("a", "a", Output("a", "a", Nil())), max_depth=1)
        assert lts.truncated and not lts.capped
        lts = explore(EVENT_PSI, frozenset(), espsi(make_es("abc")), max_states=3)
        assert lts.truncated and lts.capped

    def test_rejects_nonpositive_bounds(self):
        for kw in ({"max_depth": 0}, {"max_states": 0}):
            try:
                explore(PI, PI.unit, Nil(), **kw)
            except ValueError:
                continue
            raise AssertionError(kw)

    def test_deterministic(self):
        p = espsi(make_es("abc", conflict=[("a", "b")]))
        one, two = explore(EVENT_PSI, frozenset(), p), explore(EVENT_PSI, frozenset(), p)
        assert one.keys == two.keys and one.edges == two.edges

    def test_dot_well_formed(self):
        dot = explore(EVENT_PSI, frozenset(), espsi(make_es("ab"))).to_dot()
        assert dot.count("{") == dot.count("}")
        assert dot.startswith("digraph") and dot.rstrip().endswith("}")

    def test_dcr_absorb_keeps_behaviour(self):
        g = make_dcr("ab")
        plain = explore(DCR_PSI, DCR_PSI.unit, explore_dcrpsi(g).states[0], max_depth=3, tau_only=True)
        merged = explore_dcrpsi(g, max_depth=3)
        assert len(merged.states) < len(plain.states)
        frames = {(d, canonical(s, DCR_PSI, absorb=True)) for s, d in zip(plain.states, plain.depth)}
        assert {(d, k) for k, d in zip(merged.keys, merged.depth)} == frames
