"""Prime event structures, their configurations, and action refinement."""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from itertools import combinations

from psiforge.terms import Name, name

Configuration = frozenset  # frozenset[Name]

DEFAULT_CONFIG_BOUND = 16


class UnknownEvent(KeyError):
    pass


class NotEnabled(ValueError):
    def __init__(self, event: Name, reason: str):
        super().__init__(f"event {event} not enabled: {reason}")
        self.event = event
        self.reason = reason


class TooLarge(ValueError):
    pass


class MissingLabel(KeyError):
    pass


class InvalidEventStructure(ValueError):
    def __init__(self, violations: list[Violation]):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = violations


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple

    def __str__(self) -> str:
        return f"{self.axiom} {self.witness}"


@dataclass(frozen=True)
class EventStructure:
    """A finite labelled prime event structure.

    ``causes`` holds the strict causality order as ``(before, after)`` pairs,
    ``conflict`` holds unordered pairs as two-element frozensets.  The
    constructor does not validate; use :func:`make_es` or :func:`validate_es`.
    """

    events: frozenset[Name]
    causes: frozenset[tuple[Name, Name]] = frozenset()
    conflict: frozenset[frozenset[Name]] = frozenset()
    labels: Mapping[Name, str] = field(default_factory=dict, compare=False, hash=False)

    def __eq__(self, other):
        if not isinstance(other, EventStructure):
            return NotImplemented
        return (
            self.events == other.events
            and self.causes == other.causes
            and self.conflict == other.conflict
            and self.label_map() == other.label_map()
        )

    def __hash__(self):
        return hash((self.events, self.causes, self.conflict))

    def label(self, e: Name) -> str:
        return self.labels.get(e, e)

    def label_map(self) -> dict[Name, str]:
        return {e: self.label(e) for e in self.events}

    def leq(self, d: Name, e: Name) -> bool:
        """Reflexive causality."""
        return d == e or (d, e) in self.causes

    def in_conflict(self, d: Name, e: Name) -> bool:
        return frozenset((d, e)) in self.conflict and d != e

    def sorted_events(self) -> list[Name]:
        return sorted(self.events)


def make_es(
    events: Iterable[str],
    causes: Iterable[tuple[str, str]] = (),
    conflict: Iterable[tuple[str, str]] = (),
    labels: Mapping[str, str] | None = None,
    *,
    close: bool = True,
    validate: bool = True,
) -> EventStructure:
    """Build an event structure, taking the transitive closure of ``causes``.

    With ``close`` the conflict relation is also saturated under heredity.
    Reflexive pairs in ``causes`` are dropped (causality is stored strictly).
    """
    evs = frozenset(name(e) for e in events)
    lt = {(name(a), name(b)) for a, b in causes if a != b}
    cf = {frozenset((name(a), name(b))) for a, b in conflict}
    if close:
        lt = transitive_closure(lt)
        cf = hereditary_closure(lt, cf)
    es = EventStructure(evs, frozenset(lt), frozenset(cf), dict(labels or {}))
    if validate:
        violations = validate_es(es)
        if violations:
            raise InvalidEventStructure(violations)
    return es


def transitive_closure(pairs: Iterable[tuple[Name, Name]]) -> set[tuple[Name, Name]]:
    closure = set(pairs)
    while True:
        extra = {(a, d) for a, b in closure for c, d in closure if b == c} - closure
        if not extra:
            return closure
        closure |= extra


def hereditary_closure(lt: set[tuple[Name, Name]], cf: set[frozenset]) -> set[frozenset]:
    """Saturate conflict under d <= e and d # f implies e # f."""
    cf = set(cf)
    changed = True
    while changed:
        changed = False
        for pair in list(cf):
            if len(pair) != 2:
                continue
            d, f = tuple(pair)
            for a, e in lt:
                for x, y in ((d, f), (f, d)):
                    if a == x and e != y:
                        new = frozenset((e, y))
                        if new not in cf:
                            cf.add(new)
                            changed = True
    return cf


def validate_es(es: EventStructure) -> list[Violation]:
    """Every violated axiom, each with a witness; empty when valid."""
    out: list[Violation] = []
    evs = es.events
    for a, b in sorted(es.causes):
        if a not in evs or b not in evs:
            out.append(Violation("unknown-event", (a, b)))
        if a == b:
            out.append(Violation("causality-irreflexive-storage", (a, b)))
    for a, b in sorted(es.causes):
        if a < b and (b, a) in es.causes:
            out.append(Violation("antisymmetry", (a, b)))
    for a, b in sorted(es.causes):
        for c, d in sorted(es.causes):
            if b == c and a != d and (a, d) not in es.causes:
                out.append(Violation("transitivity", (a, b, d)))
    for pair in sorted(es.conflict, key=sorted):
        if len(pair) == 1:
            (a,) = pair
            out.append(Violation("conflict-irreflexivity", (a, a)))
        for x in pair:
            if x not in evs:
                out.append(Violation("unknown-event", tuple(sorted(pair))))
                break
    # heredity: d <= e, d # f  =>  e # f
    for d, e in sorted(es.causes):
        for pair in sorted(es.conflict, key=sorted):
            if d in pair and len(pair) == 2:
                (f,) = pair - {d}
                if e == f:
                    # d <= e and d # e makes e # e, which irreflexivity forbids
                    out.append(Violation("conflict-heredity", (d, e, f)))
                elif frozenset((e, f)) not in es.conflict:
                    out.append(Violation("conflict-heredity", (d, e, f)))
    return out


def _check(es: EventStructure, *evs: Name) -> None:
    for e in evs:
        if e not in es.events:
            raise UnknownEvent(e)


def preconditions(es: EventStructure, e: Name) -> frozenset[Name]:
    """Strict causes of ``e``."""
    _check(es, e)
    return frozenset(d for d, x in es.causes if x == e)


def conflicts(es: EventStructure, e: Name) -> frozenset[Name]:
    _check(es, e)
    return frozenset(x for pair in es.conflict if e in pair and len(pair) == 2 for x in pair if x != e)


def is_configuration(es: EventStructure, c: Iterable[Name]) -> bool:
    c = frozenset(c)
    if not c <= es.events:
        return False
    for d, e in es.causes:
        if e in c and d not in c:
            return False
    return not any(pair <= c for pair in es.conflict)


def enabled_reason(es: EventStructure, c: frozenset[Name], e: Name) -> str | None:
    """Why ``e`` cannot extend ``c``, or None when it can."""
    _check(es, e)
    if e in c:
        return "already-in"
    missing = sorted(preconditions(es, e) - c)
    if missing:
        return f"missing cause {missing[0]}"
    clash = sorted(conflicts(es, e) & c)
    if clash:
        return f"conflict with {clash[0]}"
    return None


def es_step(es: EventStructure, c: Iterable[Name], e: Name) -> Configuration:
    c = frozenset(c)
    reason = enabled_reason(es, c, e)
    if reason is not None:
        raise NotEnabled(e, reason)
    return c | {e}


def es_enabled(es: EventStructure, c: frozenset[Name]) -> list[Name]:
    return [e for e in es.sorted_events() if enabled_reason(es, c, e) is None]


def configurations(es: EventStructure, bound: int = DEFAULT_CONFIG_BOUND) -> set[Configuration]:
    """All configurations, by breadth-first search from the empty one."""
    if len(es.events) > bound:
        raise TooLarge(f"{len(es.events)} events exceed the enumeration bound {bound}")
    start: Configuration = frozenset()
    seen = {start}
    queue = deque([start])
    while queue:
        c = queue.popleft()
        for e in es_enabled(es, c):
            nxt = c | {e}
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def step_graph(es: EventStructure, bound: int = DEFAULT_CONFIG_BOUND) -> set[tuple[Configuration, Name, Configuration]]:
    return {(c, e, c | {e}) for c in configurations(es, bound) for e in es_enabled(es, c)}


def concurrent(es: EventStructure, d: Name, e: Name) -> bool:
    _check(es, d, e)
    return not (es.leq(d, e) or es.leq(e, d) or es.in_conflict(d, e))


@dataclass(frozen=True)
class Relations:
    causes: frozenset[tuple[Name, Name]]
    conflict: frozenset[frozenset[Name]]
    concurrency: frozenset[frozenset[Name]]


def recover_relations(configs: Iterable[Iterable[Name]], events: Iterable[Name]) -> Relations:
    """Read strict causality, conflict and concurrency off a configuration set."""
    cs = [frozenset(c) for c in configs]
    cset = set(cs)
    evs = sorted(set(events))
    causes = set()
    for d in evs:
        for e in evs:
            if d != e and all(d in c for c in cs if e in c):
                causes.add((d, e))
    conflict = set()
    concurrency = set()
    for d, e in combinations(evs, 2):
        if not any(d in c and e in c for c in cs):
            conflict.add(frozenset((d, e)))
        with_d = [c for c in cs if d in c and e not in c]
        with_e = [c for c in cs if e in c and d not in c]
        if any(c1 | c2 in cset for c1 in with_d for c2 in with_e):
            concurrency.add(frozenset((d, e)))
    return Relations(frozenset(causes), frozenset(conflict), frozenset(concurrency))


def relations_of(es: EventStructure) -> Relations:
    """The same triple computed directly from the structure."""
    conc = {frozenset((d, e)) for d, e in combinations(es.sorted_events(), 2) if concurrent(es, d, e)}
    return Relations(es.causes, frozenset(p for p in es.conflict if len(p) == 2), frozenset(conc))


# ---------------------------------------------------------------- refinement

SEP = "."


def pair_name(e: Name, sub: Name) -> Name:
    return name(f"{e}{SEP}{sub}")


def split_pair(n: Name) -> tuple[Name, Name]:
    e, _, sub = n.partition(SEP)
    return e, sub


def check_refinement_function(ref: Mapping[str, EventStructure]) -> None:
    for label, image in ref.items():
        if not image.events:
            raise ValueError(f"refinement of {label} is empty")
        if any(len(p) == 2 for p in image.conflict):
            raise ValueError(f"refinement of {label} has conflicts")


def refine_es(es: EventStructure, ref: Mapping[str, EventStructure]) -> EventStructure:
    """Replace every event by a copy of the conflict-free structure for its label.

    Refined events are named ``e.e'``.  A pair ``(d,d')`` causes ``(e,e')``
    when d strictly causes e, or d = e and d' causes e' inside the image.
    """
    check_refinement_function(ref)
    images = {}
    for e in es.events:
        lab = es.label(e)
        if lab not in ref:
            raise MissingLabel(lab)
        images[e] = ref[lab]
    events = {pair_name(e, s): (e, s) for e in es.events for s in images[e].events}
    causes = set()
    conflict = set()
    for x, (d, ds) in events.items():
        for y, (e, es_) in events.items():
            if x == y:
                continue
            if (d, e) in es.causes or (d == e and (ds, es_) in images[e].causes):
                causes.add((x, y))
            if es.in_conflict(d, e):
                conflict.add(frozenset((x, y)))
    labels = {x: images[e].label(s) for x, (e, s) in events.items()}
    return EventStructure(frozenset(events), frozenset(causes), frozenset(conflict), labels)


def identity_refinement(es: EventStructure) -> dict[str, EventStructure]:
    """Every label refined into a single event named after the label."""
    return {lab: make_es([lab]) for lab in set(es.label_map().values())}
