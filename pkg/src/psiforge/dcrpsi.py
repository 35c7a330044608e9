"""DCR graphs as psi-processes.

Assertions are markings tagged with a generation number; composition keeps
the newest generation (uniting markings of equal generation).  The encoded
process keeps one message on channel ``m`` carrying the current marking.
Every event is a replicated guarded input that consumes the message, and
leaves behind the updated marking both as a new message and as a new
assertion one generation younger.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, NamedTuple

from psiforge.dcr import DcrGraph, Marking, check_marking
from psiforge.instance import ChanEq, Instance
from psiforge.lts import Lts, explore
from psiforge.process import (
    Assert,
    Bang,
    Case,
    Input,
    Nil,
    Output,
    Par,
    Process,
    Restrict,
    par,
)
from psiforge.semantics import Budget, frame
from psiforge.terms import Name, Var, is_ground, map_atoms, name, show

CHANNEL: Name = name("m")


class DcrAssertion(NamedTuple):
    executed: Any
    responses: Any
    included: Any
    generation: Any

    def marking(self) -> Marking:
        return Marking(self.executed, self.responses, self.included)

    def show(self) -> str:
        return "(" + ",".join(show(x) for x in self) + ")"


UNIT = DcrAssertion(frozenset(), frozenset(), frozenset(), 0)


@dataclass(frozen=True)
class DcrCondition:
    conditions: frozenset[Name]
    milestones: frozenset[Name]
    event: Name

    def show(self) -> str:
        return f"({show(self.conditions)},{show(self.milestones)},{self.event})"


@dataclass(frozen=True)
class MarkingUpdate:
    """The marking after executing ``event``, as a term over a received one.

    Evaluates to a ground :class:`DcrAssertion` as soon as ``source`` is
    ground, so terms stay finite after communication.
    """

    source: DcrAssertion
    event: Name
    responses: frozenset[Name]
    excludes: frozenset[Name]
    includes: frozenset[Name]

    def __psi_map__(self, fn):
        src = map_atoms(self.source, fn)
        upd = MarkingUpdate(
            src,
            fn(self.event),
            map_atoms(self.responses, fn),
            map_atoms(self.excludes, fn),
            map_atoms(self.includes, fn),
        )
        return upd.evaluate() if is_ground(src) else upd

    def evaluate(self) -> DcrAssertion:
        ex, re, inc, gen = self.source
        return DcrAssertion(
            ex | {self.event},
            (re - {self.event}) | self.responses,
            (inc - self.excludes) | self.includes,
            gen + 1,
        )

    def show(self) -> str:
        ex, re, inc, gen = (show(x) for x in self.source)
        e = self.event
        return (
            f"({ex}+{{{e}}},({re}-{{{e}}})+{show(self.responses)},"
            f"({inc}-{show(self.excludes)})+{show(self.includes)},s({gen}))"
        )


def dcr_compose(a: DcrAssertion, b: DcrAssertion) -> DcrAssertion:
    if a.generation > b.generation:
        return a
    if a.generation < b.generation:
        return b
    return DcrAssertion(a.executed | b.executed, a.responses | b.responses, a.included | b.included, a.generation)


def dcr_entails(a: DcrAssertion, cond: DcrCondition) -> bool:
    ex, re, inc, _ = a
    return cond.event in inc and (inc & cond.conditions) <= ex and not (inc & cond.milestones & re)


class DcrPsiInstance(Instance):
    name = "dcr-psi"
    unit = UNIT

    def compose(self, a, b):
        return dcr_compose(a, b)

    def entails(self, a, cond) -> bool:
        if isinstance(cond, ChanEq):
            return cond.left == cond.right
        return dcr_entails(a, cond)


def make_dcr_psi_instance() -> DcrPsiInstance:
    return DcrPsiInstance()


DCR_PSI = DcrPsiInstance()

X_VARS = (Var("X_E"), Var("X_R"), Var("X_I"), Var("X_G"))


def event_guard(g: DcrGraph, e: Name) -> DcrCondition:
    return DcrCondition(g.pre("conditions", e), g.pre("milestones", e), e)


def event_process(g: DcrGraph, e: Name) -> Process:
    pattern = DcrAssertion(*X_VARS)
    update = MarkingUpdate(pattern, e, g.post("responses", e), g.post("excludes", e), g.post("includes", e))
    receive = Input(CHANNEL, X_VARS, pattern, Par(Output(CHANNEL, update, Nil()), Assert(update)))
    return Bang(Case(((event_guard(g, e), receive),)))


def dcrpsi(g: DcrGraph, m: Marking | None = None) -> Process:
    """Encode ``g`` in marking ``m`` (default: the initial marking)."""
    if m is None:
        m = g.initial_marking()
    check_marking(g, m)
    start = DcrAssertion(*m, 0)
    state = Par(Assert(start), Output(CHANNEL, start, Nil()))
    events = [event_process(g, e) for e in sorted(g.events)]
    return Par(state, par(*events)) if events else state


def count_outputs(p: Process) -> int:
    """Output prefixes not guarded by any other prefix, case or replication."""
    match p:
        case Output():
            return 1
        case Par(l, r):
            return count_outputs(l) + count_outputs(r)
        case Restrict(_, body):
            return count_outputs(body)
    return 0


def pending_payloads(p: Process) -> list[Any]:
    match p:
        case Output(_, n, _):
            return [n]
        case Par(l, r):
            return pending_payloads(l) + pending_payloads(r)
        case Restrict(_, body):
            return pending_payloads(body)
    return []


def frame_assertion(p: Process) -> DcrAssertion:
    return frame(DCR_PSI, p).assertion


def explore_dcrpsi(g: DcrGraph, m: Marking | None = None, max_depth: int = 8, max_states: int = 10_000,
                   budget: Budget | None = None, absorb: bool = True) -> Lts:
    """Tau-only exploration of the encoding.

    Stale assertions (older generations) are absorbed by default; without
    that every interleaving history is a distinct state.
    """
    return explore(DCR_PSI, UNIT, dcrpsi(g, m), max_depth, max_states, tau_only=True,
                   budget=budget, absorb=absorb)
