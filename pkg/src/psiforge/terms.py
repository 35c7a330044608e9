"""Generic nominal data: names, pattern variables and structural walkers.

Names are plain interned strings.  Terms, conditions and assertions of the
shipped instances are built from names, :class:`Var`, ints, tuples
(including named tuples), frozensets and frozen dataclasses.  The helpers in
this module walk any such value, so the engine can rename, substitute, match
and order instance payloads without knowing what they mean.

A class may take over its own traversal by defining
``__psi_map__(self, fn)`` which must return ``type(self)``-like data with
every atom rewritten through ``fn``.  This is how symbolic update terms get
evaluated once their variables become ground.
"""

from __future__ import annotations

import dataclasses
import sys
from collections.abc import Callable, Iterable, Mapping
from typing import Any

Name = str


def name(text: str) -> Name:
    return sys.intern(text)


@dataclasses.dataclass(frozen=True, order=True)
class Var:
    """A pattern variable, bound by an input prefix."""

    id: str

    def __repr__(self) -> str:
        return f"?{self.id}"


Atom = Name | Var


def map_atoms(obj: Any, fn: Callable[[Any], Any]) -> Any:
    """Rebuild ``obj`` with every name and variable replaced by ``fn(atom)``."""
    if isinstance(obj, (str, Var)):
        return fn(obj)
    if obj is None or isinstance(obj, (int, bool)):
        return obj
    hook = getattr(obj, "__psi_map__", None)
    if hook is not None:
        return hook(fn)
    if isinstance(obj, tuple):
        items = [map_atoms(x, fn) for x in obj]
        if hasattr(obj, "_make"):
            return obj._make(items)
        return tuple(items)
    if isinstance(obj, frozenset):
        return frozenset(map_atoms(x, fn) for x in obj)
    if dataclasses.is_dataclass(obj):
        changes = {f.name: map_atoms(getattr(obj, f.name), fn) for f in dataclasses.fields(obj)}
        return dataclasses.replace(obj, **changes)
    raise TypeError(f"not a term: {obj!r}")


def atoms(obj: Any) -> Iterable[Any]:
    found: list[Any] = []

    def visit(a):
        found.append(a)
        return a

    map_atoms(obj, visit)
    return found


def names_of(obj: Any) -> frozenset[Name]:
    return frozenset(a for a in atoms(obj) if isinstance(a, str))


def vars_of(obj: Any) -> frozenset[Var]:
    return frozenset(a for a in atoms(obj) if isinstance(a, Var))


def is_ground(obj: Any) -> bool:
    return not vars_of(obj)


def rename(obj: Any, mapping: Mapping[Name, Name]) -> Any:
    if not mapping:
        return obj
    return map_atoms(obj, lambda a: mapping.get(a, a) if isinstance(a, str) else a)


def subst(obj: Any, binding: Mapping[Var, Any]) -> Any:
    if not binding:
        return obj
    return map_atoms(obj, lambda a: binding.get(a, a) if isinstance(a, Var) else a)


def match(pattern_vars: Iterable[Var], pattern: Any, message: Any) -> dict[Var, Any] | None:
    """First-order syntactic matching of a ground ``message`` against ``pattern``.

    Returns the unique binding for ``pattern_vars`` or None.  Variables not
    listed in ``pattern_vars`` only match themselves.
    """
    binders = frozenset(pattern_vars)
    binding: dict[Var, Any] = {}

    def go(p, m) -> bool:
        if isinstance(p, Var) and p in binders:
            if p in binding:
                return binding[p] == m
            binding[p] = m
            return True
        if isinstance(p, tuple):
            if not isinstance(m, tuple) or type(p) is not type(m) or len(p) != len(m):
                return False
            return all(go(x, y) for x, y in zip(p, m))
        if dataclasses.is_dataclass(p) and not isinstance(p, Var):
            if type(p) is not type(m):
                return False
            return all(go(getattr(p, f.name), getattr(m, f.name)) for f in dataclasses.fields(p))
        # names, ints and sets: sets in patterns must be closed
        return type(p) is type(m) and p == m

    if not go(pattern, message):
        return None
    if set(binding) != binders:
        return None
    return binding


def sort_key(obj: Any, bound: Callable[[Any], Any] | None = None) -> tuple:
    """A totally ordered key for any term.

    ``bound`` may map an atom to a replacement key (used for de Bruijn
    style canonicalisation); it returns None for atoms it does not handle.
    """
    if isinstance(obj, (str, Var)):
        if bound is not None:
            k = bound(obj)
            if k is not None:
                return k
        return ("n", obj) if isinstance(obj, str) else ("v", obj.id)
    if isinstance(obj, bool):
        return ("i", int(obj))
    if isinstance(obj, int):
        return ("i", obj)
    if obj is None:
        return ("z",)
    if isinstance(obj, tuple):
        return ("t", type(obj).__name__, tuple(sort_key(x, bound) for x in obj))
    if isinstance(obj, frozenset):
        return ("s", tuple(sorted(sort_key(x, bound) for x in obj)))
    if dataclasses.is_dataclass(obj):
        return (
            "d",
            type(obj).__name__,
            tuple(sort_key(getattr(obj, f.name), bound) for f in dataclasses.fields(obj)),
        )
    raise TypeError(f"not a term: {obj!r}")


def fresh_name(base: Name, used: set[Name] | frozenset[Name]) -> Name:
    """Smallest ``base_k`` (k >= 1) not in ``used``."""
    stem = base.split("_")[0] if "_" in base and base.rsplit("_", 1)[1].isdigit() else base
    k = 1
    while f"{stem}_{k}" in used:
        k += 1
    return name(f"{stem}_{k}")


def show(obj: Any) -> str:
    """Human-readable rendering used by the pretty printer and DOT export."""
    if isinstance(obj, str):
        return obj
    if isinstance(obj, Var):
        return obj.id
    if isinstance(obj, frozenset):
        return "{" + ",".join(sorted(show(x) for x in obj)) + "}"
    if isinstance(obj, tuple):
        return "(" + ",".join(show(x) for x in obj) + ")"
    if hasattr(obj, "show"):
        return obj.show()
    return str(obj)
