"""The pi-calculus as a psi-calculus instance.

Terms are bare names, the only assertion is the unit, and the only
conditions are name equalities, entailed exactly when both sides are the
same name.
"""

from __future__ import annotations

from typing import Any

from psiforge.instance import ChanEq, Instance

UNIT = "1"


class PiInstance(Instance):
    name = "pi"
    unit = UNIT

    def compose(self, a: Any, b: Any) -> Any:
        return UNIT

    def entails(self, a: Any, cond: Any) -> bool:
        if isinstance(cond, ChanEq):
            return cond.left == cond.right
        return False


def make_pi_instance() -> PiInstance:
    return PiInstance()
