"""Frames, substitution and the structural operational semantics.

The transition relation is computed by a single recursive pass that
collects the *commitments* of every sub-process: free outputs, symbolic
input capabilities and internal tau steps.  A parallel node lifts the
commitments of either side under the environment extended with the frame
of the other side, and pairs outputs with inputs to derive communications.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass
from typing import Any

from psiforge.instance import Instance
from psiforge.process import (
    Action,
    Assert,
    Bang,
    Case,
    Frame,
    In,
    Input,
    Nil,
    Out,
    Output,
    Par,
    Process,
    Restrict,
    Tau,
    all_names,
    free_names,
)
from psiforge.terms import Name, Var, fresh_name, match, names_of, rename, subst


class BudgetExceeded(RuntimeError):
    """Raised when replication unfolding exceeds its budget."""


class Budget:
    """A shared counter of replication unfoldings."""

    def __init__(self, limit: int = 1_000_000):
        self.limit = limit
        self.used = 0

    def spend(self) -> None:
        self.used += 1
        if self.used > self.limit:
            raise BudgetExceeded(f"more than {self.limit} replication unfoldings")


# ---------------------------------------------------------------- renaming


def rename_process(p: Process, mapping: Mapping[Name, Name]) -> Process:
    """Rename free names of ``p``; binders are renamed away from the targets."""
    if not mapping:
        return p
    match p:
        case Nil():
            return p
        case Output(m, n, cont):
            return Output(rename(m, mapping), rename(n, mapping), rename_process(cont, mapping))
        case Input(m, xs, n, cont):
            return Input(rename(m, mapping), xs, rename(n, mapping), rename_process(cont, mapping))
        case Case(branches):
            return Case(tuple((rename(c, mapping), rename_process(q, mapping)) for c, q in branches))
        case Restrict(a, body):
            inner = {k: v for k, v in mapping.items() if k != a}
            if a in inner.values():
                b = fresh_name(a, set(all_names(body)) | set(inner.values()) | set(inner))
                body = rename_process(body, {a: b})
                a = b
            return Restrict(a, rename_process(body, inner))
        case Par(l, r):
            return Par(rename_process(l, mapping), rename_process(r, mapping))
        case Bang(body):
            return Bang(rename_process(body, mapping))
        case Assert(psi):
            return Assert(rename(psi, mapping))
    raise TypeError(f"not a process: {p!r}")


def substitute(p: Process, binding: Mapping[Var, Any]) -> Process:
    """Capture-avoiding substitution of ground terms for pattern variables."""
    if not binding:
        return p
    incoming = frozenset().union(*(names_of(t) for t in binding.values()))
    return _subst(p, dict(binding), incoming)


def _subst(p: Process, binding: dict[Var, Any], incoming: frozenset[Name]) -> Process:
    if not binding:
        return p
    match p:
        case Nil():
            return p
        case Output(m, n, cont):
            return Output(subst(m, binding), subst(n, binding), _subst(cont, binding, incoming))
        case Input(m, xs, n, cont):
            inner = {k: v for k, v in binding.items() if k not in xs}
            return Input(subst(m, binding), xs, subst(n, inner), _subst(cont, inner, incoming))
        case Case(branches):
            return Case(tuple((subst(c, binding), _subst(q, binding, incoming)) for c, q in branches))
        case Restrict(a, body):
            if a in incoming:
                b = fresh_name(a, set(all_names(body)) | incoming)
                body = rename_process(body, {a: b})
                a = b
            return Restrict(a, _subst(body, binding, incoming))
        case Par(l, r):
            return Par(_subst(l, binding, incoming), _subst(r, binding, incoming))
        case Bang(body):
            return Bang(_subst(body, binding, incoming))
        case Assert(psi):
            return Assert(subst(psi, binding))
    raise TypeError(f"not a process: {p!r}")


def distinct_binders(p: Process, used: set[Name] | None = None) -> Process:
    """Alpha-rename so every restriction binds a name used nowhere else.

    ``used`` is updated in place with every name of the result.  Returns
    ``p`` itself when nothing needed renaming.
    """
    if used is None:
        used = set(free_names(p))
    return _distinct(p, used)


def _distinct(p: Process, used: set[Name]) -> Process:
    match p:
        case Restrict(a, body):
            if a in used:
                b = fresh_name(a, used | all_names(body))
                used.add(b)
                body = rename_process(body, {a: b})
                new_body = _distinct(body, used)
                return Restrict(b, new_body)
            used.add(a)
            new_body = _distinct(body, used)
            return p if new_body is body else Restrict(a, new_body)
        case Par(l, r):
            nl, nr = _distinct(l, used), _distinct(r, used)
            return p if (nl is l and nr is r) else Par(nl, nr)
        case Bang(body):
            nb = _distinct(body, used)
            return p if nb is body else Bang(nb)
        case Output(m, n, cont):
            nc = _distinct(cont, used)
            return p if nc is cont else Output(m, n, nc)
        case Input(m, xs, n, cont):
            nc = _distinct(cont, used)
            return p if nc is cont else Input(m, xs, n, nc)
        case Case(branches):
            new = tuple((c, _distinct(q, used)) for c, q in branches)
            if all(q2 is q for (_, q), (_, q2) in zip(branches, new)):
                return p
            return Case(new)
    return p


def _has_restrict(p: Process) -> bool:
    match p:
        case Restrict():
            return True
        case Par(l, r):
            return _has_restrict(l) or _has_restrict(r)
        case Bang(body) | Output(_, _, body) | Input(_, _, _, body):
            return _has_restrict(body)
        case Case(branches):
            return any(_has_restrict(q) for _, q in branches)
    return False


# ---------------------------------------------------------------- frames


def frame(inst: Instance, p: Process) -> Frame:
    """The outermost assertions of ``p`` under their restriction binders."""
    match p:
        case Assert(psi):
            return Frame((), psi)
        case Par(l, r):
            fl, fr = frame(inst, l), frame(inst, r)
            return _compose_frames(inst, fl, fr)
        case Restrict(a, body):
            fb = frame(inst, body)
            if a in fb.bound:
                b = fresh_name(a, set(fb.bound) | names_of(fb.assertion))
                fb = Frame(tuple(b if x == a else x for x in fb.bound), rename(fb.assertion, {a: b}))
            if a not in names_of(fb.assertion):
                # vacuous binder; keeping it would only break alpha-comparison
                return fb
            return Frame((a,) + fb.bound, fb.assertion)
    return Frame((), inst.unit)


def _compose_frames(inst: Instance, fl: Frame, fr: Frame) -> Frame:
    if not fl.bound and not fr.bound:
        return Frame((), inst.compose(fl.assertion, fr.assertion))
    left_names = set(fl.bound) | names_of(fl.assertion)
    used = left_names | set(fr.bound) | names_of(fr.assertion)
    mapping: dict[Name, Name] = {}
    for b in fr.bound:
        if b in left_names:
            mapping[b] = fresh_name(b, used)
            used.add(mapping[b])
    right_assertion = rename(fr.assertion, mapping)
    right_bound = tuple(mapping.get(b, b) for b in fr.bound)
    # a left binder must not capture a free name of the right assertion
    right_free = names_of(right_assertion) - set(right_bound)
    lmap: dict[Name, Name] = {}
    for b in fl.bound:
        if b in right_free:
            lmap[b] = fresh_name(b, used)
            used.add(lmap[b])
    left_assertion = rename(fl.assertion, lmap)
    left_bound = tuple(lmap.get(b, b) for b in fl.bound)
    return Frame(left_bound + right_bound, inst.compose(left_assertion, right_assertion))


# ---------------------------------------------------------------- transitions


@dataclass(frozen=True)
class _OutCap:
    channel: Any
    bound: tuple[Name, ...]
    payload: Any
    residual: Process


@dataclass(frozen=True)
class _InCap:
    channel: Any
    pattern_vars: tuple[Var, ...]
    pattern: Any
    cont: Process
    rebuild: Callable[[Process], Process]


@dataclass(frozen=True)
class _TauCap:
    residual: Process


def _ident(p: Process) -> Process:
    return p


class _Query:
    def __init__(self, inst: Instance, budget: Budget | None, used: set[Name]):
        self.inst = inst
        self.budget = budget
        self.used = used
        self._frames: dict[int, tuple[Process, Any]] = {}

    def frame_assertion(self, p: Process) -> Any:
        hit = self._frames.get(id(p))
        if hit is not None:
            return hit[1]
        match p:
            case Assert(psi):
                a = psi
            case Par(l, r):
                a = self.inst.compose(self.frame_assertion(l), self.frame_assertion(r))
            case Restrict(_, body):
                a = self.frame_assertion(body)
            case _:
                a = self.inst.unit
        self._frames[id(p)] = (p, a)
        return a

    def commitments(self, p: Process, env: Any, unfold: int) -> list:
        inst = self.inst
        match p:
            case Output(m, n, cont):
                if inst.chan_eq_holds(env, m, m):
                    return [_OutCap(m, (), n, cont)]
                return []
            case Input(m, xs, n, cont):
                return [_InCap(m, xs, n, cont, _ident)]
            case Case(branches):
                out = []
                for cond, q in branches:
                    if inst.entails(env, cond):
                        out.extend(self.commitments(q, env, unfold))
                return out
            case Restrict(a, body):
                return self._restrict(a, self.commitments(body, env, unfold))
            case Par(l, r):
                return self._par(l, r, env, unfold)
            case Bang(body):
                if unfold <= 0:
                    return []
                if self.budget is not None:
                    self.budget.spend()
                copy = body
                if _has_restrict(body):
                    copy = _distinct(body, self.used)
                # (rep): the transitions of P | !P, with the inner !P one level shallower
                return self._par(copy, p, env, unfold - 1)
        return []

    def _restrict(self, a: Name, caps: list) -> list:
        out = []
        for c in caps:
            if isinstance(c, _OutCap):
                if a in names_of(c.channel):
                    continue
                if a in names_of(c.payload):
                    out.append(_OutCap(c.channel, (a,) + c.bound, c.payload, c.residual))
                else:
                    out.append(_OutCap(c.channel, c.bound, c.payload, Restrict(a, c.residual)))
            elif isinstance(c, _InCap):
                if a in names_of(c.channel):
                    continue
                rb = c.rebuild
                out.append(_InCap(c.channel, c.pattern_vars, c.pattern, c.cont,
                                  lambda x, rb=rb: Restrict(a, rb(x))))
            else:
                out.append(_TauCap(Restrict(a, c.residual)))
        return out

    def _par(self, l: Process, r: Process, env: Any, unfold: int) -> list:
        inst = self.inst
        fl = self.frame_assertion(l)
        fr = self.frame_assertion(r)
        left = self.commitments(l, inst.compose(env, fr), unfold)
        right = self.commitments(r, inst.compose(env, fl), unfold)
        out = []
        for c in left:
            out.append(_lift(c, lambda x: Par(x, r)))
        for c in right:
            out.append(_lift(c, lambda x: Par(l, x)))
        full = None
        for outs, ins, out_left in ((left, right, True), (right, left, False)):
            senders = [c for c in outs if isinstance(c, _OutCap)]
            if not senders:
                continue
            receivers = [c for c in ins if isinstance(c, _InCap)]
            if not receivers:
                continue
            if full is None:
                full = inst.compose(inst.compose(fr, fl), env)
            for o in senders:
                for i in receivers:
                    if not inst.chan_eq_holds(full, o.channel, i.channel):
                        continue
                    binding = match(i.pattern_vars, i.pattern, o.payload)
                    if binding is None:
                        continue
                    received = i.rebuild(substitute(i.cont, binding))
                    res = Par(o.residual, received) if out_left else Par(received, o.residual)
                    for a in reversed(o.bound):
                        res = Restrict(a, res)
                    out.append(_TauCap(res))
        return out


def _lift(c, wrap: Callable[[Process], Process]):
    if isinstance(c, _OutCap):
        return _OutCap(c.channel, c.bound, c.payload, wrap(c.residual))
    if isinstance(c, _InCap):
        rb = c.rebuild
        return _InCap(c.channel, c.pattern_vars, c.pattern, c.cont, lambda x: wrap(rb(x)))
    return _TauCap(wrap(c.residual))


def transitions(
    inst: Instance,
    env: Any,
    p: Process,
    *,
    unfold: int = 1,
    budget: Budget | None = None,
) -> set[tuple[Action, Process]]:
    """All ``(action, residual)`` pairs derivable for ``p`` under ``env``.

    Inputs appear only as symbolic capabilities ``In(channel, pattern)``
    whose residual still contains the pattern variables.  ``unfold`` bounds
    how many nested replications may unfold within this one query.
    """
    if _has_restrict(p):
        used = set(free_names(p))
        p = _distinct(p, used)
    else:
        used = set()
    q = _Query(inst, budget, used)
    result: set[tuple[Action, Process]] = set()
    for c in q.commitments(p, env, unfold):
        if isinstance(c, _OutCap):
            result.add((Out(c.channel, c.bound, c.payload), c.residual))
        elif isinstance(c, _InCap):
            result.add((In(c.channel, c.pattern), c.rebuild(c.cont)))
        else:
            result.add((Tau(), c.residual))
    return result
