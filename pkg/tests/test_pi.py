from psiforge.canonical import canonical
from psiforge.checks import check_pi, pi_scenario
from psiforge.instance import ChanEq
from psiforge.pi import make_pi_instance
from psiforge.process import Nil, Out, Output, Tau
from psiforge.semantics import transitions

PI = make_pi_instance()


class TestPiInstance:
    def test_entails_reflexive_equality(self):
        assert PI.entails(PI.unit, ChanEq("a", "a"))

    def test_distinct_names_unequal(self):
        assert not PI.entails(PI.unit, ChanEq("a", "b"))

    def test_compose(self):
        assert PI.compose(PI.unit, PI.unit) == PI.unit

    def test_chan_eq_condition(self):
        assert PI.chan_eq("a", "b") == ChanEq("a", "b")


class TestScenario:
    def test_one_tau_then_one_output(self):
        steps = transitions(PI, PI.unit, pi_scenario())
        taus = [q for a, q in steps if isinstance(a, Tau)]
        assert len(taus) == 1
        assert canonical(taus[0], PI) == canonical(Output("b", "b", Nil()), PI)
        after = transitions(PI, PI.unit, taus[0])
        assert [a for a, _ in after] == [Out("b", (), "b")]

    def test_check_passes(self):
        assert check_pi().passed
