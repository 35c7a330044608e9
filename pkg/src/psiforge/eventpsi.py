"""Event structures as psi-processes.

Assertions are sets of executed events, composed by union.  A condition
``(causes, conflicts)`` holds when every cause has executed and no
conflicting event has.  Each pending event becomes a guarded self-output
that leaves its own name behind as an assertion once it fires.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any

from psiforge.canonical import canonical
from psiforge.events import (
    EventStructure,
    MissingLabel,
    check_refinement_function,
    configurations,
    conflicts,
    is_configuration,
    pair_name,
    preconditions,
    validate_es,
)
from psiforge.instance import ChanEq, Instance
from psiforge.lts import explore
from psiforge.process import Assert, Case, Nil, Out, Output, Process, par, par_components
from psiforge.semantics import frame
from psiforge.terms import Name, show

EMPTY: frozenset[Name] = frozenset()


@dataclass(frozen=True)
class EvCondition:
    causes: frozenset[Name]
    conflicts: frozenset[Name]

    def show(self) -> str:
        return f"({show(self.causes)},{show(self.conflicts)})"


class EventPsiInstance(Instance):
    name = "event-psi"
    unit = EMPTY

    def compose(self, a: frozenset, b: frozenset) -> frozenset:
        return a | b

    def entails(self, a: frozenset, cond: Any) -> bool:
        if isinstance(cond, ChanEq):
            return cond.left == cond.right
        return cond.causes <= a and not (a & cond.conflicts)


def make_event_psi_instance() -> EventPsiInstance:
    return EventPsiInstance()


EVENT_PSI = EventPsiInstance()


def ev_entails(a: frozenset[Name], cond: EvCondition) -> bool:
    return EVENT_PSI.entails(a, cond)


class InvalidConfiguration(ValueError):
    pass


def event_process(e: Name, cond: EvCondition) -> Case:
    return Case(((cond, Output(e, e, Assert(frozenset({e})))),))


def espsi(es: EventStructure, c: frozenset[Name] = EMPTY) -> Process:
    """Encode ``es`` in configuration ``c`` as an event-psi process."""
    c = frozenset(c)
    if not is_configuration(es, c):
        raise InvalidConfiguration(f"{sorted(c)} is not a configuration")
    parts: list[Process] = []
    for e in es.sorted_events():
        if e in c:
            parts.append(Assert(frozenset({e})))
        else:
            parts.append(event_process(e, EvCondition(preconditions(es, e), conflicts(es, e))))
    return par(*parts)


# ---------------------------------------------------------------- shape


@dataclass(frozen=True)
class ShapeViolation:
    """``rule`` is "grammar", "1", "2", "3", "unknown-event" or "heredity"."""

    rule: str
    detail: str

    def __str__(self) -> str:
        return f"constraint {self.rule}: {self.detail}"


class ShapeError(ValueError):
    def __init__(self, violation: ShapeViolation):
        super().__init__(str(violation))
        self.violation = violation


@dataclass(frozen=True)
class _Shape:
    executed: list[Name]
    pending: list[tuple[Name, EvCondition]]


def _components(p: Process) -> _Shape | ShapeViolation:
    executed: list[Name] = []
    pending: list[tuple[Name, EvCondition]] = []
    if isinstance(p, Nil):
        return _Shape(executed, pending)
    for q in par_components(p):
        match q:
            case Assert(psi) if isinstance(psi, frozenset) and len(psi) == 1:
                executed.append(next(iter(psi)))
            case Case(branches):
                if len(branches) != 1:
                    return ShapeViolation("grammar", f"case with {len(branches)} branches")
                cond, body = branches[0]
                if not isinstance(cond, EvCondition):
                    return ShapeViolation("grammar", f"guard {show(cond)} is not an event condition")
                match body:
                    case Output(m, n, Assert(psi)) if isinstance(m, str) and m == n and psi == frozenset({m}):
                        pending.append((m, cond))
                    case _:
                        return ShapeViolation("grammar", f"branch body {body} is not a self-output")
            case _:
                return ShapeViolation("grammar", f"component {q} outside the grammar")
    return _Shape(executed, pending)


def validate_es_shape(p: Process) -> ShapeViolation | None:
    """None when ``p`` is in the image of the event-structure encoding."""
    shape = _components(p)
    if isinstance(shape, ShapeViolation):
        return shape
    executed, pending = shape.executed, shape.pending
    # 3: no multiples, no event both executed and pending
    names = executed + [e for e, _ in pending]
    seen: set[Name] = set()
    for e in names:
        if e in seen:
            return ShapeViolation("3", f"event {e} occurs more than once")
        seen.add(e)
    guards = dict(pending)
    known = set(names)
    for e, phi in pending:
        stray = sorted((phi.causes | phi.conflicts) - known)
        if stray:
            return ShapeViolation("unknown-event", f"guard of {e} mentions {stray[0]}")
    # 1: conflict irreflexive and symmetric between pending events
    for e, phi in pending:
        if e in phi.conflicts:
            return ShapeViolation("1", f"{e} conflicts with itself")
        for f in sorted(phi.conflicts):
            if f in guards and e not in guards[f].conflicts:
                return ShapeViolation("1", f"{f} in conflicts of {e} but not vice versa")
    # 2: causality irreflexive, antisymmetric, down-sets nested
    for e, phi in pending:
        if e in phi.causes:
            return ShapeViolation("2", f"{e} causes itself")
    for e, phi in pending:
        for f, psi in pending:
            if e in psi.causes:
                if f in phi.causes:
                    return ShapeViolation("2", f"{e} and {f} cause each other")
                if not phi.causes < psi.causes:
                    return ShapeViolation("2", f"causes of {e} not strictly inside causes of {f}")
    # the reconstructed structure must also satisfy conflict heredity
    es, _ = _reconstruct(shape)
    for v in validate_es(es):
        if v.axiom == "conflict-heredity":
            return ShapeViolation("heredity", f"{v.witness}")
        return ShapeViolation("2", f"{v}")
    return None


def _reconstruct(shape: _Shape) -> tuple[EventStructure, frozenset[Name]]:
    executed = frozenset(shape.executed)
    events = executed | {e for e, _ in shape.pending}
    causes = {(d, e) for e, phi in shape.pending for d in phi.causes}
    conflict = {frozenset((d, e)) for e, phi in shape.pending for d in phi.conflicts}
    return EventStructure(frozenset(events), frozenset(causes), frozenset(conflict)), executed


def espsi_inverse(p: Process) -> tuple[EventStructure, frozenset[Name]]:
    """Recover an event structure and configuration encoded as ``p``."""
    v = validate_es_shape(p)
    if v is not None:
        raise ShapeError(v)
    shape = _components(p)
    assert isinstance(shape, _Shape)
    return _reconstruct(shape)


# ---------------------------------------------------------------- refinement


def refine_psi(
    p: Process,
    ref: Mapping[str, EventStructure],
    labels: Mapping[Name, str] | None = None,
) -> Process:
    """Refine an encoded event structure process directly on the psi side."""
    v = validate_es_shape(p)
    if v is not None:
        raise ShapeError(v)
    check_refinement_function(ref)
    shape = _components(p)
    assert isinstance(shape, _Shape)
    labels = labels or {}
    executed = frame(EVENT_PSI, p).assertion
    guards = dict(shape.pending)
    parents = sorted(set(shape.executed) | set(guards))
    images = {}
    for e in parents:
        lab = labels.get(e, e)
        if lab not in ref:
            raise MissingLabel(lab)
        images[e] = ref[lab]
    parts: list[Process] = []
    pairs = sorted((e, s) for e in parents for s in images[e].events)
    for e, s in pairs:
        x = pair_name(e, s)
        if e in executed:
            parts.append(Assert(frozenset({x})))
            continue
        phi = guards[e]
        causes = {pair_name(d, t) for d, t in pairs if d in phi.causes or (d == e and (t, s) in images[e].causes)}
        confl = {pair_name(d, t) for d, t in pairs if d in phi.conflicts}
        parts.append(event_process(x, EvCondition(frozenset(causes), frozenset(confl))))
    return par(*parts)


# ---------------------------------------------------------------- diamonds


def fired(action) -> Name | None:
    """The event whose firing an action records, if any."""
    if isinstance(action, Out) and not action.bound and action.channel == action.payload:
        return action.channel
    return None


def diamond_pairs(es: EventStructure, c: frozenset[Name]) -> set[tuple[Name, Name]]:
    """Ordered pairs (e, f) whose two interleavings from espsi(es, c) meet."""
    c = frozenset(c)
    if not is_configuration(es, c):
        raise InvalidConfiguration(f"{sorted(c)} is not a configuration")
    lts = explore(EVENT_PSI, EMPTY, espsi(es, c), max_depth=2)
    succ: dict[int, dict[Name, int]] = {}
    for s, a, t in lts.edges:
        ev = fired(a)
        if ev is not None:
            succ.setdefault(s, {})[ev] = t
    out = set()
    first = succ.get(0, {})
    for e, p1 in first.items():
        for f, p3 in first.items():
            p2 = succ.get(p1, {}).get(f)
            if p2 is not None and p2 == succ.get(p3, {}).get(e):
                out.add((e, f))
    return out


def check_diamond(es: EventStructure, c: frozenset[Name], e: Name, f: Name) -> bool:
    """Both interleavings of e and f exist from espsi(es, c) and meet."""
    return (e, f) in diamond_pairs(es, c)


def espsi_key(es: EventStructure, c: frozenset[Name]) -> tuple:
    return canonical(espsi(es, c), EVENT_PSI)


def reachable_diamond(es: EventStructure, e: Name, f: Name) -> frozenset[Name] | None:
    """Some configuration from which e and f form a diamond, if there is one."""
    for c in sorted(configurations(es), key=lambda c: (len(c), sorted(c))):
        if check_diamond(es, c, e, f):
            return c
    return None


__all__ = [
    "EvCondition",
    "EventPsiInstance",
    "make_event_psi_instance",
    "ev_entails",
    "espsi",
    "espsi_inverse",
    "validate_es_shape",
    "refine_psi",
    "check_diamond",
    "diamond_pairs",
    "reachable_diamond",
    "ShapeViolation",
    "ShapeError",
    "InvalidConfiguration",
]
