"""Closed-form example objectives: 1-D Gaussian mixture, Peaks, nonsmooth conic."""

import numpy as np

from ..core import Constraints, ProblemSpec

GAUSSMIX_BOX = (-5.0, 5.0)
PEAKS_BOX = ((-3.0, 3.0), (-3.0, 3.0))
CONIC_BOX = ((-6.0, 6.0), (-6.0, 6.0))


def gaussian_mixture_1d(x):
    x = np.asarray(x, dtype=float)
    return -0.8 * np.exp(-(x - 2.0) ** 2) - 0.5 * np.exp(-(x + 2.0) ** 2) + 1.0


def peaks(x1, x2):
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    return (3.0 * (1 - x1) ** 2 * np.exp(-x1**2 - (x2 + 1) ** 2)
            - 10.0 * (x1 / 5 - x1**3 - x2**5) * np.exp(-x1**2 - x2**2)
            - np.exp(-(x1 + 1) ** 2 - x2**2) / 3.0)


def conic_objective(x1, x2):
    """Piecewise objective with half-open branches split at -5, -3 and 0."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    ax2 = np.abs(x2)
    return np.select(
        [x1 < -5.0, x1 < -3.0, x1 < 0.0],
        [(x1 + 5.0) ** 2 + ax2, -2.0 * np.sin(x1) + ax2, 0.5 * x1 + 2.0 + ax2],
        0.3 * np.sqrt(np.maximum(x1, 0.0)) + 2.5 + ax2,
    )


def conic_inequality(x1, x2):
    return 2.0 * np.asarray(x1, dtype=float) ** 2 + np.asarray(x2, dtype=float) ** 2 - 3.0


def conic_equality(x1, x2):
    return (np.asarray(x1, dtype=float) + 1.0) ** 2 - (np.asarray(x2, dtype=float) / 2.0) ** 4


def nonsmooth_conic(x1, x2):
    """Return ``(F, G, H)``: objective, inequality (<= 0) and equality (= 0)."""
    return conic_objective(x1, x2), conic_inequality(x1, x2), conic_equality(x1, x2)


def gaussmix_problem() -> ProblemSpec:
    return ProblemSpec(lambda X: gaussian_mixture_1d(X[:, 0]), [GAUSSMIX_BOX[0]], [GAUSSMIX_BOX[1]],
                       is_vectorized=True)


def peaks_problem() -> ProblemSpec:
    lb, ub = zip(*PEAKS_BOX)
    return ProblemSpec(lambda X: peaks(X[:, 0], X[:, 1]), lb, ub, is_vectorized=True)


def conic_problem() -> ProblemSpec:
    lb, ub = zip(*CONIC_BOX)
    return ProblemSpec(
        lambda X: conic_objective(X[:, 0], X[:, 1]), lb, ub,
        Constraints(equality=lambda X: conic_equality(X[:, 0], X[:, 1]),
                    inequality=lambda X: conic_inequality(X[:, 0], X[:, 1])),
        is_vectorized=True,
    )
