"""Canonical forms for state deduplication.

Parallel composition is flattened to a sorted multiset, Nil (and the unit
assertion, when an instance is supplied) is dropped, and binders are
replaced by de Bruijn levels.  Two processes get the same key exactly when
they are equal up to those laws.
"""

from __future__ import annotations

from typing import Any

from psiforge.instance import Instance
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
    par_components,
)
from psiforge.terms import is_ground, sort_key

NIL_KEY = ("0",)


def canonical(p: Process, inst: Instance | None = None, *, absorb: bool = False) -> tuple:
    """Hashable, totally ordered key of ``p`` modulo the laws above.

    With ``absorb`` (requires ``inst``), an assertion component is also
    dropped when the other assertions of the same parallel group already
    absorb it, i.e. composing it in leaves their composition unchanged.
    Assertion components never disappear, so this identifies processes
    with identical behaviour.
    """
    if absorb and inst is None:
        raise ValueError("absorb needs an instance")
    return _canon(p, {}, 0, inst, absorb)


def _absorbed(inst: Instance, parts: list[Process]) -> list[Process]:
    asserts = sorted(
        (q for q in parts if isinstance(q, Assert) and is_ground(q.assertion)),
        key=lambda q: sort_key(q.assertion),
    )
    if len(asserts) < 2:
        return parts
    kept = list(asserts)
    i = 0
    while i < len(kept) and len(kept) > 1:
        rest = kept[:i] + kept[i + 1:]
        rest_total = inst.compose_all(q.assertion for q in rest)
        if inst.assertion_eq(inst.compose(rest_total, kept[i].assertion), rest_total):
            kept = rest
        else:
            i += 1
    dropped = {id(q) for q in asserts} - {id(q) for q in kept}
    return [q for q in parts if id(q) not in dropped]


def _canon(p: Process, env: dict, depth: int, inst: Instance | None, absorb: bool = False) -> tuple:
    def key(t: Any) -> tuple:
        if not env:
            return sort_key(t)
        return sort_key(t, lambda a: ("b", env[a]) if a in env else None)

    match p:
        case Nil():
            return NIL_KEY
        case Assert(psi):
            if inst is not None and inst.assertion_eq(psi, inst.unit):
                return NIL_KEY
            return ("A", key(psi))
        case Output(m, n, cont):
            return ("O", key(m), key(n), _canon(cont, env, depth, inst, absorb))
        case Input(m, xs, n, cont):
            inner = dict(env)
            for i, x in enumerate(xs):
                inner[x] = depth + i
            d = depth + len(xs)
            pat = sort_key(n, lambda a: ("b", inner[a]) if a in inner else None)
            return ("I", key(m), len(xs), pat, _canon(cont, inner, d, inst, absorb))
        case Case(branches):
            return ("C", tuple((key(c), _canon(q, env, depth, inst, absorb)) for c, q in branches))
        case Restrict(a, body):
            inner = dict(env)
            inner[a] = depth
            return ("R", _canon(body, inner, depth + 1, inst, absorb))
        case Par():
            comps = par_components(p)
            if absorb:
                comps = _absorbed(inst, comps)
            parts = [_canon(q, env, depth, inst, absorb) for q in comps]
            parts = [k for k in parts if k != NIL_KEY]
            if not parts:
                return NIL_KEY
            if len(parts) == 1:
                return parts[0]
            return ("P", tuple(sorted(parts)))
        case Bang(body):
            return ("B", _canon(body, env, depth, inst, absorb))
    raise TypeError(f"not a process: {p!r}")


def canonically_equal(p: Process, q: Process, inst: Instance | None = None) -> bool:
    return canonical(p, inst) == canonical(q, inst)
