"""Cross-entropy global optimization over boxes, with augmented-Lagrangian constraints."""

from .constrained import ce_minimize_constrained
from .core import (CeSettings, Constraints, IterationRecord, ProblemError, ProblemSpec,
                   RunResult, SettingsError, default_settings, validate_problem)
from .solver import ce_minimize
from .stats import RngStream

__all__ = [
    "CeSettings", "Constraints", "IterationRecord", "ProblemError", "ProblemSpec", "RunResult",
    "RngStream", "SettingsError", "ce_minimize", "ce_minimize_constrained", "default_settings",
    "minimize", "validate_problem",
]


def minimize(problem, xmean0, sigma0, settings=None, rng=None, *, workers=1):
    """Dispatch to the constrained or unconstrained solver."""
    if problem.is_constrained:
        return ce_minimize_constrained(problem, xmean0, sigma0, settings, rng, workers=workers)
    return ce_minimize(problem, xmean0, sigma0, settings, rng, workers=workers)
