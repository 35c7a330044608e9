"""Property suites checking the encodings against their source models.

Each suite draws seeded random inputs, runs one family of correspondence
properties and returns a :class:`CheckReport`.  Reports are deterministic
for a given seed.
"""

from __future__ import annotations

import random
from collections.abc import Callable
from dataclasses import dataclass, field
from itertools import product
from typing import Any

from psiforge.canonical import canonical
from psiforge.dcr import (
    dcr_enabled,
    dcr_enabled_subset_form,
    dcr_execute,
    dcr_transitions,
    es_to_dcr,
    markings_by_depth,
    reachable_markings,
)
from psiforge.dcrpsi import (
    DCR_PSI,
    DcrAssertion,
    count_outputs,
    dcr_entails,
    dcrpsi,
    event_guard,
    explore_dcrpsi,
    frame_assertion,
    pending_payloads,
)
from psiforge.eventpsi import (
    EMPTY,
    EVENT_PSI,
    EvCondition,
    diamond_pairs,
    espsi,
    espsi_inverse,
    event_process,
    fired,
    refine_psi,
    validate_es_shape,
)
from psiforge.events import (
    EventStructure,
    concurrent,
    configurations,
    recover_relations,
    refine_es,
    relations_of,
    step_graph,
    validate_es,
)
from psiforge.generators import random_dcr, random_es, random_marking, random_refinement
from psiforge.instance import Instance
from psiforge.lts import explore
from psiforge.pi import make_pi_instance
from psiforge.process import Assert, Case, Input, Nil, Out, Output, Par, Process, Tau, par, par_components
from psiforge.semantics import frame, transitions
from psiforge.terms import Var, show


@dataclass
class CheckReport:
    name: str
    inputs_tried: int = 0
    failures: list[tuple[str, Any, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, subject: Any, expected: Any, actual: Any) -> None:
        self.failures.append((_serial(subject), expected, actual))

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.inputs_tried} inputs, {len(self.failures)} failures"

    def render(self, limit: int = 5) -> str:
        lines = [self.summary()]
        for subject, expected, actual in self.failures[:limit]:
            lines.append(f"  input:    {subject}")
            lines.append(f"  expected: {expected}")
            lines.append(f"  actual:   {actual}")
        if len(self.failures) > limit:
            lines.append(f"  ... {len(self.failures) - limit} more")
        return "\n".join(lines)


def _serial(x: Any) -> str:
    if isinstance(x, EventStructure):
        from psiforge.syntax import serialize_es

        return serialize_es(x).replace("\n", "; ")
    if isinstance(x, tuple) and x and isinstance(x[0], EventStructure):
        return " / ".join(_serial(y) for y in x)
    return str(x)


# ---------------------------------------------------------------- instance laws


def _sample_sets(rng: random.Random, universe: list[str]) -> frozenset:
    return frozenset(x for x in universe if rng.random() < 0.5)


def _sample_assertion(rng: random.Random, inst: Instance, universe: list[str]) -> Any:
    if inst.name == "pi":
        return inst.unit
    if inst.name == "event-psi":
        return _sample_sets(rng, universe)
    return DcrAssertion(
        _sample_sets(rng, universe), _sample_sets(rng, universe), _sample_sets(rng, universe), rng.randint(0, 3)
    )


def check_instance_laws(seed: int = 0, samples: int = 500, universe_size: int = 6) -> CheckReport:
    rng = random.Random(seed)
    report = CheckReport("laws")
    universe = [f"n{i}" for i in range(universe_size)]
    for inst in (make_pi_instance(), EVENT_PSI, DCR_PSI):
        eq, comp = inst.assertion_eq, inst.compose
        for _ in range(samples):
            report.inputs_tried += 1
            a, b, c = (_sample_assertion(rng, inst, universe) for _ in range(3))
            subject = f"{inst.name}: {show(a)} {show(b)} {show(c)}"
            if not eq(comp(a, comp(b, c)), comp(comp(a, b), c)):
                report.fail(subject, "associative", "not associative")
            if not eq(comp(a, b), comp(b, a)):
                report.fail(subject, "commutative", "not commutative")
            if not eq(comp(inst.unit, a), a):
                report.fail(subject, "unit identity", comp(inst.unit, a))
            # compose preserves assertion equality: a copy of a must behave as a
            a2 = _copy(a)
            if eq(a, a2) and not eq(comp(a, b), comp(a2, b)):
                report.fail(subject, "compositional", "not compositional")
        # channel equality over a finite term universe, under a few assertions
        terms = list(universe)
        for _ in range(5):
            psi = _sample_assertion(rng, inst, universe)
            report.inputs_tried += 1
            holds = {(m, n): inst.chan_eq_holds(psi, m, n) for m, n in product(terms, repeat=2)}
            for (m, n), h in holds.items():
                if h != holds[(n, m)]:
                    report.fail(f"{inst.name}: {m},{n}", "symmetric", "asymmetric")
            for m, n, k in product(terms, repeat=3):
                if holds[(m, n)] and holds[(n, k)] and not holds[(m, k)]:
                    report.fail(f"{inst.name}: {m},{n},{k}", "transitive", "not transitive")
    return report


def _copy(a: Any) -> Any:
    if isinstance(a, DcrAssertion):
        return DcrAssertion(*(frozenset(x) if isinstance(x, frozenset) else x for x in a))
    if isinstance(a, frozenset):
        return frozenset(a)
    return a


# ---------------------------------------------------------------- event structures


def _es_corpus(seed: int, count: int, max_events: int, **kw) -> list[EventStructure]:
    rng = random.Random(seed)
    return [random_es(rng, max_events, **kw) for _ in range(count)]


def check_frames(seed: int = 7, count: int = 200, max_events: int = 6) -> CheckReport:
    """frame(espsi(es, c)) is c for every configuration c."""
    report = CheckReport("frames")
    for es in _es_corpus(seed, count, max_events):
        for c in sorted(configurations(es), key=sorted):
            report.inputs_tried += 1
            got = frame(EVENT_PSI, espsi(es, c))
            if got.bound or got.assertion != c:
                report.fail((es, sorted(c)), sorted(c), got)
    return report


def check_steps(seed: int = 7, count: int = 200, max_events: int = 6) -> CheckReport:
    """Configuration steps and free-output transitions match one to one."""
    report = CheckReport("steps")
    for es in _es_corpus(seed, count, max_events):
        report.inputs_tried += 1
        configs = configurations(es)
        key = {c: canonical(espsi(es, c), EVENT_PSI) for c in configs}
        if len(set(key.values())) != len(key):
            report.fail(es, "injective encoding of configurations", "collision")
            continue
        lts = explore(EVENT_PSI, EMPTY, espsi(es, frozenset()), max_depth=len(es.events) + 1, max_states=100_000)
        if lts.truncated:
            report.fail(es, "complete exploration", "truncated")
            continue
        expected = {(key[c], e, key[c2]) for c, e, c2 in step_graph(es)}
        actual = set()
        for s, a, t in lts.edges:
            ev = fired(a)
            if ev is None:
                report.fail(es, "only event-firing labels", str(a))
            actual.add((lts.keys[s], ev, lts.keys[t]))
        if set(lts.keys) != set(key.values()):
            report.fail(es, f"{len(key)} states", f"{len(lts.keys)} states")
        if expected != actual:
            report.fail(es, f"{len(expected)} steps", f"{len(actual)} transitions")
    return report


def check_diamonds(seed: int = 7, count: int = 200, max_events: int = 6) -> CheckReport:
    """Concurrency coincides with reachable interleaving diamonds."""
    report = CheckReport("diamonds")
    for es in _es_corpus(seed, count, max_events):
        report.inputs_tried += 1
        found: set[tuple[str, str]] = set()
        for c in configurations(es):
            found |= diamond_pairs(es, c)
        for e in es.sorted_events():
            for f in es.sorted_events():
                if concurrent(es, e, f) != ((e, f) in found):
                    report.fail((es, e, f), concurrent(es, e, f), (e, f) in found)
    return report


# ---------------------------------------------------------------- syntactic shape


def _pieces(p: Process) -> list[Process]:
    return [] if isinstance(p, Nil) else par_components(p)


def _guard_of(q: Process) -> tuple[str, EvCondition] | None:
    if isinstance(q, Case):
        cond, body = q.branches[0]
        return body.channel, cond
    return None


def _mutate(rng: random.Random, p: Process) -> Process:
    parts = _pieces(p)
    if not parts:
        return p
    i = rng.randrange(len(parts))
    q = parts[i]
    g = _guard_of(q)
    kind = rng.randrange(5)
    if kind == 0:
        # drop a component
        return par(*(parts[:i] + parts[i + 1:]))
    if kind == 1 and g is not None:
        # the pending event happened
        e, _ = g
        return par(*(parts[:i] + [Assert(frozenset({e}))] + parts[i + 1:]))
    if kind == 2 and g is not None:
        # drop one cause
        e, cond = g
        if cond.causes:
            d = rng.choice(sorted(cond.causes))
            new = event_process(e, EvCondition(cond.causes - {d}, cond.conflicts))
            return par(*(parts[:i] + [new] + parts[i + 1:]))
    if kind == 3:
        # add a symmetric conflict between two pending events
        pending = [(j, _guard_of(x)) for j, x in enumerate(parts) if _guard_of(x) is not None]
        if len(pending) >= 2:
            (j, (e, ce)), (k, (f, cf)) = rng.sample(pending, 2)
            parts = list(parts)
            parts[j] = event_process(e, EvCondition(ce.causes, ce.conflicts | {f}))
            parts[k] = event_process(f, EvCondition(cf.causes, cf.conflicts | {e}))
            return par(*parts)
    # shuffle the parallel order
    parts = list(parts)
    rng.shuffle(parts)
    return par(*parts)


def shape_valid_corpus(seed: int, count: int, max_events: int = 6) -> list[Process]:
    rng = random.Random(seed)
    out: list[Process] = []
    while len(out) < count:
        es = random_es(rng, max_events)
        configs = sorted(configurations(es), key=lambda c: (len(c), sorted(c)))
        p = espsi(es, rng.choice(configs))
        for _ in range(rng.randrange(4)):
            q = _mutate(rng, p)
            if validate_es_shape(q) is None:
                p = q
        out.append(p)
    return out


def negative_cases(rule: str, seed: int, count: int = 20) -> list[Process]:
    """Processes that break exactly one of the numbered shape constraints."""
    rng = random.Random(seed)
    out: list[Process] = []
    while len(out) < count:
        es = random_es(rng, 6, min_events=2)
        p = espsi(es, frozenset())
        parts = _pieces(p)
        pending = [(j, _guard_of(x)) for j, x in enumerate(parts)]
        j, (e, cond) = rng.choice(pending)
        if rule == "1":
            others = [f for _, (f, _) in pending if f != e and f not in cond.conflicts]
            if others and rng.random() < 0.5:
                new_cond = EvCondition(cond.causes, cond.conflicts | {rng.choice(others)})
            else:
                new_cond = EvCondition(cond.causes, cond.conflicts | {e})
            parts[j] = event_process(e, new_cond)
        elif rule == "2":
            others = [f for _, (f, c2) in pending if f != e and e not in c2.causes]
            if others and rng.random() < 0.5:
                # f now causes e, but the causes of f are not inside those of e
                f = rng.choice(others)
                fj = next(k for k, (x, _) in pending if x == f)
                fcond = pending[fj][1][1]
                extra = next((x for _, (x, _) in pending if x not in (e, f)), None)
                if e not in fcond.causes and extra is not None and extra not in cond.causes:
                    parts[fj] = event_process(f, EvCondition(fcond.causes | {extra}, fcond.conflicts))
                    parts[j] = event_process(e, EvCondition(cond.causes | {f}, cond.conflicts))
                else:
                    parts[j] = event_process(e, EvCondition(cond.causes | {e}, cond.conflicts))
            else:
                parts[j] = event_process(e, EvCondition(cond.causes | {e}, cond.conflicts))
        else:
            if rng.random() < 0.5:
                parts.append(parts[j])
            else:
                parts.append(Assert(frozenset({e})))
        rng.shuffle(parts)
        out.append(par(*parts))
    return out


def check_shape(seed: int = 7, count: int = 200, negatives: int = 20) -> CheckReport:
    report = CheckReport("shape")
    for p in shape_valid_corpus(seed, count):
        report.inputs_tried += 1
        es, c = espsi_inverse(p)
        if validate_es(es):
            report.fail(p, "a valid event structure", validate_es(es))
            continue
        if canonical(espsi(es, c), EVENT_PSI) != canonical(p, EVENT_PSI):
            report.fail(p, str(p), str(espsi(es, c)))
    # round trip from the structure side, empty configuration
    for es in _es_corpus(seed + 1, count, 6):
        report.inputs_tried += 1
        es2, c2 = espsi_inverse(espsi(es, frozenset()))
        if (es2.events, es2.causes, es2.conflict, c2) != (es.events, es.causes, es.conflict, frozenset()):
            report.fail(es, _serial(es), _serial(es2))
    for rule in ("1", "2", "3"):
        for p in negative_cases(rule, seed + int(rule), negatives):
            report.inputs_tried += 1
            v = validate_es_shape(p)
            if v is None or v.rule != rule:
                report.fail(p, f"violation of constraint {rule}", v)
    return report


# ---------------------------------------------------------------- refinement


def check_refinement(seed: int = 7, count: int = 100, max_events: int = 5, ref_events: int = 3) -> CheckReport:
    report = CheckReport("refinement")
    rng = random.Random(seed)
    labels = ["l0", "l1", "l2"]
    for _ in range(count):
        report.inputs_tried += 1
        es = random_es(rng, max_events, labels=labels)
        ref = random_refinement(rng, labels, ref_events)
        refined = refine_es(es, ref)
        bad = validate_es(refined)
        if bad:
            report.fail(es, "refined structure is prime", bad)
            continue
        left = espsi(refined, frozenset())
        right = refine_psi(espsi(es, frozenset()), ref, es.label_map())
        if canonical(left, EVENT_PSI) != canonical(right, EVENT_PSI):
            report.fail(es, str(left), str(right))
    return report


def check_relations(seed: int = 7, count: int = 200, max_events: int = 6) -> CheckReport:
    report = CheckReport("relations")
    for es in _es_corpus(seed, count, max_events):
        report.inputs_tried += 1
        got = recover_relations(configurations(es), es.events)
        want = relations_of(es)
        if got != want:
            report.fail(es, want, got)
        for d in es.sorted_events():
            for e in es.sorted_events():
                if d < e and concurrent(es, d, e) != (frozenset((d, e)) in got.concurrency):
                    report.fail((es, d, e), concurrent(es, d, e), not concurrent(es, d, e))
    return report


# ---------------------------------------------------------------- DCR


def check_dcr_semantics(seed: int = 7, triples: int = 500, count: int = 100, max_events: int = 5) -> CheckReport:
    report = CheckReport("dcr")
    rng = random.Random(seed)
    for _ in range(triples):
        report.inputs_tried += 1
        g = random_dcr(rng, max_events)
        m = random_marking(rng, g)
        e = rng.choice(sorted(g.events))
        a = DcrAssertion(*m, rng.randint(0, 3))
        want = dcr_enabled(g, m, e)
        if dcr_entails(a, event_guard(g, e)) != want:
            report.fail((g, m, e), want, not want)
        if dcr_enabled_subset_form(g, m, e) != want:
            report.fail((g, m, e), "both enabledness forms agree", "they differ")
    for _ in range(count):
        report.inputs_tried += 1
        es = random_es(rng, max_events)
        g, m0 = es_to_dcr(es)
        graph = reachable_markings(g, m0)
        by_ex = {}
        for m in graph:
            by_ex.setdefault(m.executed, []).append(m)
        if any(len(ms) > 1 for ms in by_ex.values()):
            report.fail(es, "markings determined by executed events", "two markings share Ex")
            continue
        if set(by_ex) != configurations(es):
            report.fail(es, sorted(map(sorted, configurations(es))), sorted(map(sorted, by_ex)))
        edges = {(m.executed, e, m2.executed) for m, steps in graph.items() for e, m2 in steps}
        if edges != step_graph(es):
            report.fail(es, "isomorphic step graphs", "edge sets differ")
    return report


def check_dcrpsi(seed: int = 7, count: int = 100, max_events: int = 5, density: float = 0.3,
                 depth: int = 8, max_states: int = 10_000) -> CheckReport:
    """Invariants of every reachable state of the DCR encoding, and its steps."""
    report = CheckReport("dcrpsi")
    rng = random.Random(seed)
    for i in range(count):
        g = random_dcr(rng, max_events, density)
        m0 = g.initial_marking() if i % 2 == 0 else random_marking(rng, g)
        subject = (g, m0)
        report.inputs_tried += 1
        p0 = dcrpsi(g, m0)
        if frame_assertion(p0) != DcrAssertion(*m0, 0):
            report.fail(subject, DcrAssertion(*m0, 0), frame_assertion(p0))
        lts = explore_dcrpsi(g, m0, max_depth=depth, max_states=max_states)
        if lts.capped:
            report.fail(subject, f"at most {max_states} states", "state limit hit")
            continue
        frames = [frame_assertion(p) for p in lts.states]
        for j, p in enumerate(lts.states):
            fr = frames[j]
            if count_outputs(p) != 1:
                report.fail(subject, "one pending output", count_outputs(p))
            payloads = pending_payloads(p)
            if payloads and payloads[0] != fr:
                report.fail(subject, fr, payloads[0])
            if fr.generation != lts.depth[j]:
                report.fail(subject, f"generation {lts.depth[j]}", fr.generation)
            live = [q for q in par_components(p) if isinstance(q, Assert) and q.assertion.generation == fr.generation]
            if len(live) != 1:
                report.fail(subject, "one assertion of the newest generation", len(live))
        # steps of the encoding are exactly the DCR steps, state by state
        succ: dict[int, set] = {}
        for s, a, t in lts.edges:
            if not isinstance(a, Tau):
                report.fail(subject, "tau", str(a))
            succ.setdefault(s, set()).add(frames[t].marking())
        for j in range(len(lts.states)):
            if lts.depth[j] >= depth:
                continue
            m = frames[j].marking()
            want = {m2 for _, m2 in dcr_transitions(g, m)}
            if succ.get(j, set()) != want:
                report.fail(subject, sorted(map(show, want)), sorted(map(show, succ.get(j, set()))))
        layers = markings_by_depth(g, m0, depth)
        got: list[set] = [set() for _ in range(depth + 1)]
        for j, d in enumerate(lts.depth):
            got[d].add(frames[j].marking())
        for k in range(depth + 1):
            if got[k] != layers[k]:
                report.fail(subject, f"depth {k}: {len(layers[k])} markings", f"{len(got[k])} frames")
    return report


# ---------------------------------------------------------------- pi


def pi_scenario() -> Process:
    x = Var("x")
    return Par(Input("a", (x,), x, Output(x, x, Nil())), Output("a", "b", Nil()))


def check_pi(seed: int = 0) -> CheckReport:
    """a(x).'x<x> | 'a<b>: exactly one tau, then exactly one 'b<b>."""
    report = CheckReport("pi")
    pi = make_pi_instance()
    report.inputs_tried = 1
    p = pi_scenario()
    taus = [(a, q) for a, q in transitions(pi, pi.unit, p) if isinstance(a, Tau)]
    if len(taus) != 1:
        report.fail(p, "one tau", len(taus))
        return report
    after = taus[0][1]
    want = canonical(Par(Output("b", "b", Nil()), Nil()), pi)
    if canonical(after, pi) != want:
        report.fail(p, "'b<b>.0 | 0", str(after))
    nxt = list(transitions(pi, pi.unit, after))
    if [a for a, _ in nxt] != [Out("b", (), "b")]:
        report.fail(after, "one 'b<b>", [str(a) for a, _ in nxt])
    return report


SUITES: dict[str, Callable[..., CheckReport]] = {
    "laws": check_instance_laws,
    "frames": check_frames,
    "steps": check_steps,
    "diamonds": check_diamonds,
    "shape": check_shape,
    "refinement": check_refinement,
    "relations": check_relations,
    "dcr": check_dcr_semantics,
    "dcrpsi": check_dcrpsi,
    "pi": check_pi,
}

# numbered result names accepted on the command line
ALIASES = {
    "lemma1": "frames",
    "lemma2": "steps",
    "theorem1": "diamonds",
    "theorem2": "diamonds",
    "theorem3": "shape",
    "theorem4": "refinement",
    "remark1": "relations",
    "lemma3": "dcrpsi",
    "lemma4": "dcrpsi",
    "lemma5": "dcrpsi",
    "lemma6": "dcrpsi",
    "theorem6": "dcrpsi",
}
