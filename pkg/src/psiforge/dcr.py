"""Dynamic Condition Response graphs: markings, enabledness and execution."""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import NamedTuple

from psiforge.events import EventStructure
from psiforge.terms import Name, name

Rel = frozenset  # frozenset[tuple[Name, Name]]

RELATIONS = ("conditions", "responses", "milestones", "includes", "excludes")


class UnknownEvent(KeyError):
    pass


class NotEnabled(ValueError):
    pass


class InvalidGraph(ValueError):
    pass


class Marking(NamedTuple):
    executed: frozenset[Name]
    responses: frozenset[Name]
    included: frozenset[Name]


@dataclass(frozen=True)
class DcrGraph:
    events: frozenset[Name]
    conditions: Rel = frozenset()  # (a, b): a must have executed before b
    responses: Rel = frozenset()  # (a, b): executing a makes b a pending response
    milestones: Rel = frozenset()  # (a, b): b is blocked while a is an included pending response
    includes: Rel = frozenset()
    excludes: Rel = frozenset()
    labels: Mapping[Name, str] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        for rel in RELATIONS:
            for a, b in getattr(self, rel):
                if a not in self.events or b not in self.events:
                    raise InvalidGraph(f"{rel} pair ({a}, {b}) mentions an undeclared event")

    def label(self, e: Name) -> str:
        return self.labels.get(e, e)

    def pre(self, rel: str, e: Name) -> frozenset[Name]:
        """Events related *to* ``e`` by ``rel``."""
        return frozenset(a for a, b in getattr(self, rel) if b == e)

    def post(self, rel: str, e: Name) -> frozenset[Name]:
        """Events ``e`` relates to by ``rel``."""
        return frozenset(b for a, b in getattr(self, rel) if a == e)

    def initial_marking(self) -> Marking:
        return Marking(frozenset(), frozenset(), self.events)


def make_dcr(events: Iterable[str], labels: Mapping[str, str] | None = None, **relations) -> DcrGraph:
    unknown = set(relations) - set(RELATIONS)
    if unknown:
        raise TypeError(f"unknown relations {sorted(unknown)}")
    rels = {k: frozenset((name(a), name(b)) for a, b in v) for k, v in relations.items()}
    return DcrGraph(frozenset(name(e) for e in events), labels=dict(labels or {}), **rels)


def marking(executed=(), responses=(), included=()) -> Marking:
    return Marking(frozenset(executed), frozenset(responses), frozenset(included))


def check_marking(g: DcrGraph, m: Marking) -> None:
    for part, s in zip(Marking._fields, m):
        if not s <= g.events:
            raise InvalidGraph(f"marking {part} mentions undeclared events {sorted(s - g.events)}")


def dcr_enabled(g: DcrGraph, m: Marking, e: Name) -> bool:
    if e not in g.events:
        raise UnknownEvent(e)
    ex, re, inc = m
    if e not in inc:
        return False
    if not (inc & g.pre("conditions", e)) <= ex:
        return False
    return not (inc & g.pre("milestones", e) & re)


def dcr_enabled_subset_form(g: DcrGraph, m: Marking, e: Name) -> bool:
    """Enabledness with the milestone clause written as a subset of E minus Re."""
    ex, re, inc = m
    return (
        e in inc
        and (inc & g.pre("conditions", e)) <= ex
        and (inc & g.pre("milestones", e)) <= (g.events - re)
    )


def dcr_execute(g: DcrGraph, m: Marking, e: Name) -> Marking:
    if not dcr_enabled(g, m, e):
        raise NotEnabled(f"event {e} is not enabled in {m}")
    ex, re, inc = m
    return Marking(
        ex | {e},
        (re - {e}) | g.post("responses", e),
        (inc - g.post("excludes", e)) | g.post("includes", e),
    )


def dcr_transitions(g: DcrGraph, m: Marking) -> set[tuple[Name, Marking]]:
    return {(e, dcr_execute(g, m, e)) for e in sorted(g.events) if dcr_enabled(g, m, e)}


def reachable_markings(g: DcrGraph, m: Marking, limit: int = 100_000) -> dict[Marking, set[tuple[Name, Marking]]]:
    """The reachable marking graph as an adjacency map."""
    graph: dict[Marking, set[tuple[Name, Marking]]] = {}
    queue = deque([m])
    graph[m] = set()
    while queue:
        cur = queue.popleft()
        steps = dcr_transitions(g, cur)
        graph[cur] = steps
        for _, nxt in steps:
            if nxt not in graph:
                if len(graph) >= limit:
                    raise RuntimeError(f"more than {limit} reachable markings")
                graph[nxt] = set()
                queue.append(nxt)
    return graph


def markings_by_depth(g: DcrGraph, m: Marking, depth: int) -> list[set[Marking]]:
    """``layers[k]`` is the set of markings reachable in exactly k steps."""
    layers = [{m}]
    for _ in range(depth):
        layers.append({nxt for cur in layers[-1] for _, nxt in dcr_transitions(g, cur)})
    return layers


def es_to_dcr(es: EventStructure) -> tuple[DcrGraph, Marking]:
    """Embed an event structure: causality as conditions, conflict plus
    self-exclusion as exclusions, everything initially included."""
    excludes = {(e, e) for e in es.events}
    for pair in es.conflict:
        if len(pair) == 2:
            a, b = tuple(pair)
            excludes |= {(a, b), (b, a)}
    g = DcrGraph(
        es.events,
        conditions=frozenset(es.causes),
        excludes=frozenset(excludes),
        labels=dict(es.labels),
    )
    return g, g.initial_marking()
