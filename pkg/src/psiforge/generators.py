"""Seeded random inputs for the property checks."""

from __future__ import annotations

import random

from psiforge.dcr import RELATIONS, DcrGraph, Marking
from psiforge.events import EventStructure, hereditary_closure, make_es, transitive_closure
from psiforge.terms import name


def event_names(n: int, prefix: str = "e") -> list[str]:
    return [name(f"{prefix}{i}") for i in range(n)]


def random_es(
    rng: random.Random,
    max_events: int = 6,
    *,
    min_events: int = 1,
    causality: float = 0.3,
    conflict: float = 0.2,
    labels: list[str] | None = None,
    prefix: str = "e",
) -> EventStructure:
    """Random DAG causality (transitively closed) and hereditary conflict."""
    n = rng.randint(min_events, max_events)
    evs = event_names(n, prefix)
    # a random DAG: edges only go forward in a shuffled order
    order = evs[:]
    rng.shuffle(order)
    lt = set()
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < causality:
                lt.add((order[i], order[j]))
    lt = transitive_closure(lt)
    cf = set()
    for i in range(n):
        for j in range(i + 1, n):
            a, b = evs[i], evs[j]
            if (a, b) not in lt and (b, a) not in lt and rng.random() < conflict:
                cf.add(frozenset((a, b)))
    cf = hereditary_closure(lt, cf)
    # heredity can force d # e with d <= e; drop such pairs' sources and retry
    if any(frozenset((a, b)) in cf for a, b in lt):
        return random_es(rng, max_events, min_events=min_events, causality=causality,
                         conflict=conflict, labels=labels, prefix=prefix)
    lab = {e: rng.choice(labels) for e in evs} if labels else {}
    return make_es(evs, lt, [tuple(p) for p in cf], lab, close=False)


def random_conflict_free_es(rng: random.Random, max_events: int = 3, prefix: str = "u") -> EventStructure:
    return random_es(rng, max_events, conflict=0.0, causality=0.4, prefix=prefix)


def random_refinement(rng: random.Random, labels: list[str], max_events: int = 3) -> dict[str, EventStructure]:
    return {lab: random_conflict_free_es(rng, max_events) for lab in labels}


def random_dcr(rng: random.Random, max_events: int = 5, density: float = 0.3, *, min_events: int = 1) -> DcrGraph:
    """Every relation sampled independently per ordered pair (self-pairs included)."""
    n = rng.randint(min_events, max_events)
    evs = event_names(n)
    rels = {}
    for rel in RELATIONS:
        rels[rel] = frozenset((a, b) for a in evs for b in evs if rng.random() < density)
    return DcrGraph(frozenset(evs), **rels)


def random_marking(rng: random.Random, g: DcrGraph, density: float = 0.3) -> Marking:
    evs = sorted(g.events)

    def pick(p: float) -> frozenset:
        return frozenset(e for e in evs if rng.random() < p)

    return Marking(pick(density), pick(density), pick(1 - density))
