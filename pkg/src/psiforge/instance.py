"""The parameter bundle that turns the generic engine into a concrete calculus."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from psiforge.terms import show


@dataclass(frozen=True)
class ChanEq:
    """The channel-equality condition ``left <-> right``."""

    left: Any
    right: Any

    def show(self) -> str:
        return f"{show(self.left)}<->{show(self.right)}"


class Instance:
    """Base class for psi-calculus instances.

    Subclasses provide ``unit``, ``compose`` and ``entails``.  Channel
    equality defaults to syntactic term equality, which is what every
    shipped instance uses; override ``chan_eq_holds`` for anything richer.
    """

    name = "abstract"
    unit: Any = None

    def compose(self, a: Any, b: Any) -> Any:
        raise NotImplementedError

    def entails(self, a: Any, cond: Any) -> bool:
        raise NotImplementedError

    def chan_eq(self, m: Any, n: Any) -> ChanEq:
        return ChanEq(m, n)

    def chan_eq_holds(self, a: Any, m: Any, n: Any) -> bool:
        return self.entails(a, self.chan_eq(m, n))

    def assertion_eq(self, a: Any, b: Any) -> bool:
        # Every shipped instance has canonical assertion values, so
        # entailment-equivalence coincides with structural equality.
        return a == b

    def compose_all(self, assertions) -> Any:
        acc = self.unit
        for a in assertions:
            acc = self.compose(acc, a)
        return acc

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"
