"""Breadth-first exploration of the transition graph of a process."""

from __future__ import annotations

from collections import deque
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

from psiforge.canonical import canonical
from psiforge.instance import Instance
from psiforge.process import Action, In, Process, Tau
from psiforge.semantics import Budget, transitions


@dataclass
class Lts:
    states: list[Process] = field(default_factory=list)
    keys: list[tuple] = field(default_factory=list)
    depth: list[int] = field(default_factory=list)
    edges: list[tuple[int, Action, int]] = field(default_factory=list)
    truncated: bool = False
    capped: bool = False  # the state limit was hit

    def successors(self, i: int) -> list[tuple[Action, int]]:
        return [(a, t) for s, a, t in self.edges if s == i]

    def index_of(self, key: tuple) -> int | None:
        try:
            return self.keys.index(key)
        except ValueError:
            return None

    def layers(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for i, d in enumerate(self.depth):
            out.setdefault(d, []).append(i)
        return out

    def to_dot(self, name: str = "lts", render: Callable[[Process], str] = str) -> str:
        lines = [f"digraph {name} {{", "  rankdir=LR;", '  node [shape=box, fontname="monospace"];']
        for i, p in enumerate(self.states):
            shape = ", peripheries=2" if i == 0 else ""
            lines.append(f'  s{i} [label="{_escape(render(p))}"{shape}];')
        for s, a, t in self.edges:
            lines.append(f'  s{s} -> s{t} [label="{_escape(str(a))}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def explore(
    inst: Instance,
    env: Any,
    p: Process,
    max_depth: int = 8,
    max_states: int = 10_000,
    *,
    tau_only: bool = False,
    budget: Budget | None = None,
    absorb: bool = False,
) -> Lts:
    """BFS over ``transitions`` with states deduplicated by canonical form.

    Symbolic input capabilities are never followed.  ``absorb`` is passed
    on to :func:`canonical`.  States at
    ``max_depth`` are kept but not expanded; ``truncated`` is set when one
    of them still has moves, or when ``max_states`` is hit.
    """
    if max_depth <= 0 or max_states <= 0:
        raise ValueError("max_depth and max_states must be positive")
    if budget is None:
        budget = Budget()
    lts = Lts()
    index: dict[tuple, int] = {}

    def add(q: Process, k: tuple, d: int) -> int | None:
        i = index.get(k)
        if i is not None:
            return i
        if len(lts.states) >= max_states:
            lts.truncated = lts.capped = True
            return None
        i = len(lts.states)
        index[k] = i
        lts.states.append(q)
        lts.keys.append(k)
        lts.depth.append(d)
        queue.append(i)
        return i

    def steps(q: Process) -> list[tuple[Action, Process, tuple]]:
        out = []
        for action, r in transitions(inst, env, q, budget=budget):
            if isinstance(action, In) or (tau_only and not isinstance(action, Tau)):
                continue
            out.append((action, r, canonical(r, inst, absorb=absorb)))
        out.sort(key=lambda x: (str(x[0]), x[2]))
        return out

    queue: deque[int] = deque()
    add(p, canonical(p, inst, absorb=absorb), 0)
    while queue:
        i = queue.popleft()
        d = lts.depth[i]
        if d >= max_depth:
            if not lts.truncated and steps(lts.states[i]):
                lts.truncated = True
            continue
        seen: set[tuple] = set()
        for action, q, k in steps(lts.states[i]):
            j = add(q, k, d + 1)
            if j is None or (action, j) in seen:
                continue
            seen.add((action, j))
            lts.edges.append((i, action, j))
    return lts
