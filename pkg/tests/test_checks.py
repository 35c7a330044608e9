import psiforge.checks as checks
import psiforge.dcrpsi as dcrpsi
from psiforge.checks import CheckReport
from psiforge.dcrpsi import DcrAssertion
from psiforge.eventpsi import EvCondition, event_process


class TestCheckReport:
    def test_passed_iff_no_failures(self):
        r = CheckReport("x", 3)
        assert r.passed
        r.fail("in", "want", "got")
        assert not r.passed
        assert r.render().splitlines()[0] == "FAIL x: 3 inputs, 1 failures"

    def test_deterministic(self):
        one = checks.check_shape(seed=5, count=20, negatives=5)
        two = checks.check_shape(seed=5, count=20, negatives=5)
        assert one == two


class TestSuitesCatchBugs:
    """Each suite must fail when the code it checks is broken."""

    def test_dcrpsi_catches_lost_responses(self, monkeypatch):
        def evaluate(self):
            ex, re, inc, gen = self.source
            return DcrAssertion(ex | {self.event}, re - {self.event}, (inc - self.excludes) | self.includes, gen + 1)

        monkeypatch.setattr(dcrpsi.MarkingUpdate, "evaluate", evaluate)
        assert not checks.check_dcrpsi(count=30).passed

    def test_shape_catches_dropped_conflicts(self, monkeypatch):
        monkeypatch.setattr(checks, "event_process", lambda e, c: event_process(e, EvCondition(c.causes, frozenset())))
        assert not checks.check_shape(count=50).passed

    def test_diamonds_catch_wrong_concurrency(self, monkeypatch):
        real = checks.concurrent
        monkeypatch.setattr(checks, "concurrent", lambda es, a, b: real(es, a, b) or (a, b) in es.causes)
        assert not checks.check_diamonds(count=50).passed

    def test_steps_catch_missing_guard(self, monkeypatch):
        real = checks.espsi

        def loose(es, c=frozenset()):
            from psiforge.events import make_es

            return real(make_es(es.events), c)

        monkeypatch.setattr(checks, "espsi", loose)
        assert not checks.check_steps(count=50).passed

    def test_dcr_semantics_catch_milestone_bug(self, monkeypatch):
        monkeypatch.setattr(checks, "dcr_enabled", lambda g, m, e: e in m.included)
        assert not checks.check_dcr_semantics(triples=100, count=5).passed
