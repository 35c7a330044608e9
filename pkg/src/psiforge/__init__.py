"""A psi-calculus engine with encodings of prime event structures and DCR graphs."""

from psiforge.canonical import canonical, canonically_equal
from psiforge.dcr import DcrGraph, Marking, dcr_enabled, dcr_execute, dcr_transitions, es_to_dcr, make_dcr
# the dcrpsi encoder stays at psiforge.dcrpsi.dcrpsi so the submodule is not shadowed
from psiforge.dcrpsi import DcrAssertion, explore_dcrpsi, make_dcr_psi_instance
from psiforge.eventpsi import check_diamond, espsi, espsi_inverse, make_event_psi_instance, refine_psi, validate_es_shape
from psiforge.events import EventStructure, configurations, make_es, refine_es, validate_es
from psiforge.lts import Lts, explore
from psiforge.pi import make_pi_instance
from psiforge.process import Assert, Bang, Case, Input, Nil, Output, Par, Restrict
from psiforge.semantics import Budget, BudgetExceeded, frame, substitute, transitions

__all__ = [
    "Assert", "Bang", "Budget", "BudgetExceeded", "Case", "DcrAssertion", "DcrGraph", "EventStructure",
    "Input", "Lts", "Marking", "Nil", "Output", "Par", "Restrict",
    "canonical", "canonically_equal", "check_diamond", "configurations", "dcr_enabled", "dcr_execute",
    "dcr_transitions", "es_to_dcr", "espsi", "espsi_inverse", "explore", "explore_dcrpsi", "frame",
    "make_dcr", "make_dcr_psi_instance", "make_es", "make_event_psi_instance", "make_pi_instance",
    "refine_es", "refine_psi", "substitute", "transitions", "validate_es", "validate_es_shape",
]
