"""Psi-process syntax, actions and frames."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Union

from psiforge.terms import Name, Var, names_of, show, vars_of


class MalformedProcess(ValueError):
    pass


@dataclass(frozen=True)
class Nil:
    def __str__(self) -> str:
        return "0"


@dataclass(frozen=True)
class Output:
    channel: Any
    payload: Any
    cont: Process = field(default_factory=Nil)

    def __str__(self) -> str:
        return f"'{show(self.channel)}<{show(self.payload)}>.{_wrap(self.cont)}"


@dataclass(frozen=True)
class Input:
    channel: Any
    pattern_vars: tuple[Var, ...]
    pattern: Any
    cont: Process = field(default_factory=Nil)

    def __post_init__(self):
        object.__setattr__(self, "pattern_vars", tuple(self.pattern_vars))
        if len(set(self.pattern_vars)) != len(self.pattern_vars):
            raise MalformedProcess(f"repeated pattern variable in {self.pattern_vars}")
        missing = set(self.pattern_vars) - vars_of(self.pattern)
        if missing:
            raise MalformedProcess(f"pattern variables {sorted(missing)} do not occur in pattern")

    def __str__(self) -> str:
        xs = ",".join(v.id for v in self.pattern_vars)
        return f"{show(self.channel)}(\\{xs}){show(self.pattern)}.{_wrap(self.cont)}"


@dataclass(frozen=True)
class Case:
    branches: tuple[tuple[Any, Process], ...]

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple((c, p) for c, p in self.branches))

    def __str__(self) -> str:
        arms = " [] ".join(f"{show(c)} : {p}" for c, p in self.branches)
        return f"case {arms}"


@dataclass(frozen=True)
class Restrict:
    name: Name
    body: Process

    def __str__(self) -> str:
        return f"(new {self.name}){_wrap(self.body)}"


@dataclass(frozen=True)
class Par:
    left: Process
    right: Process

    def __str__(self) -> str:
        return f"{self.left} | {self.right}"


@dataclass(frozen=True)
class Bang:
    body: Process

    def __str__(self) -> str:
        return f"!{_wrap(self.body)}"


@dataclass(frozen=True)
class Assert:
    assertion: Any

    def __str__(self) -> str:
        return f"(|{show(self.assertion)}|)"


Process = Union[Nil, Output, Input, Case, Restrict, Par, Bang, Assert]


def _wrap(p: Process) -> str:
    return f"({p})" if isinstance(p, (Par, Case)) else str(p)


def par(*procs: Process) -> Process:
    """Right-nested parallel composition; the empty composition is Nil."""
    if not procs:
        return Nil()
    result = procs[-1]
    for p in reversed(procs[:-1]):
        result = Par(p, result)
    return result


def par_components(p: Process) -> list[Process]:
    """Flatten nested Par nodes, left to right."""
    out: list[Process] = []
    stack = [p]
    while stack:
        q = stack.pop()
        if isinstance(q, Par):
            stack.append(q.right)
            stack.append(q.left)
        else:
            out.append(q)
    return out


def drop_nils(p: Process) -> Process:
    """Remove Nil components from every parallel composition (for display)."""
    match p:
        case Par():
            return par(*(drop_nils(q) for q in par_components(p) if not isinstance(q, Nil)))
        case Output(m, n, cont):
            return Output(m, n, drop_nils(cont))
        case Input(m, xs, n, cont):
            return Input(m, xs, n, drop_nils(cont))
        case Case(branches):
            return Case(tuple((c, drop_nils(q)) for c, q in branches))
        case Restrict(a, body):
            return Restrict(a, drop_nils(body))
        case Bang(body):
            return Bang(drop_nils(body))
    return p


@dataclass(frozen=True)
class Out:
    channel: Any
    bound: tuple[Name, ...]
    payload: Any

    def __str__(self) -> str:
        nu = f"(new {','.join(self.bound)})" if self.bound else ""
        return f"'{show(self.channel)}{nu}{show(self.payload)}"


@dataclass(frozen=True)
class In:
    """Symbolic input capability: ``pattern`` may still contain its variables."""

    channel: Any
    pattern: Any

    def __str__(self) -> str:
        return f"{show(self.channel)}<<{show(self.pattern)}>>"


@dataclass(frozen=True)
class Tau:
    def __str__(self) -> str:
        return "tau"


Action = Union[Out, In, Tau]


@dataclass(frozen=True)
class Frame:
    bound: tuple[Name, ...]
    assertion: Any


def free_names(p: Process) -> frozenset[Name]:
    match p:
        case Nil():
            return frozenset()
        case Output(m, n, cont):
            return names_of(m) | names_of(n) | free_names(cont)
        case Input(m, _, n, cont):
            return names_of(m) | names_of(n) | free_names(cont)
        case Case(branches):
            out: frozenset[Name] = frozenset()
            for c, q in branches:
                out |= names_of(c) | free_names(q)
            return out
        case Restrict(a, body):
            return free_names(body) - {a}
        case Par(l, r):
            return free_names(l) | free_names(r)
        case Bang(body):
            return free_names(body)
        case Assert(psi):
            return names_of(psi)
    raise TypeError(f"not a process: {p!r}")


def all_names(p: Process) -> frozenset[Name]:
    """Free names plus every restricted name, anywhere in ``p``."""
    match p:
        case Restrict(a, body):
            return all_names(body) | {a}
        case Par(l, r):
            return all_names(l) | all_names(r)
        case Bang(body):
            return all_names(body)
        case Output(_, _, cont) | Input(_, _, _, cont):
            return names_of(_prefix_terms(p)) | all_names(cont)
        case Case(branches):
            out: frozenset[Name] = frozenset()
            for c, q in branches:
                out |= names_of(c) | all_names(q)
            return out
    return free_names(p)


def _prefix_terms(p: Output | Input) -> tuple:
    if isinstance(p, Output):
        return (p.channel, p.payload)
    return (p.channel, p.pattern)


def free_vars(p: Process) -> frozenset[Var]:
    match p:
        case Nil():
            return frozenset()
        case Output(m, n, cont):
            return vars_of(m) | vars_of(n) | free_vars(cont)
        case Input(m, xs, n, cont):
            return vars_of(m) | ((vars_of(n) | free_vars(cont)) - set(xs))
        case Case(branches):
            out: frozenset[Var] = frozenset()
            for c, q in branches:
                out |= vars_of(c) | free_vars(q)
            return out
        case Restrict(_, body) | Bang(body):
            return free_vars(body)
        case Par(l, r):
            return free_vars(l) | free_vars(r)
        case Assert(psi):
            return vars_of(psi)
    raise TypeError(f"not a process: {p!r}")
