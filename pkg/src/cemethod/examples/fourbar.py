"""Dimensional synthesis of a four-bar linkage whose coupler point tracks a curve.

The crank length is fixed at ``a = 1`` and the coupler triangle is isosceles
with ``b = c = f``. The design vector is ``[b, d, gamma, theta_D, theta_0]``;
the crank angles ``theta_A`` form a fixed sweep shared with the target curve.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources

import numpy as np

from ..core import ProblemSpec

A_CRANK = 1.0
INFEASIBLE_PENALTY = 1e6
LOWER = np.array([0.5, 0.5, 0.0, -np.pi, -np.pi])
UPPER = np.array([5.0, 5.0, np.pi, np.pi, np.pi])
TARGET_FILE = "fourbar_target.csv"
# design that generated the shipped target curve
TARGET_DESIGN = (2.0, 2.5, np.pi / 2, 0.3, 0.2)
TARGET_POINTS = 36


class InfeasibleLinkage(ValueError):
    def __init__(self, message, theta_a):
        super().__init__(message)
        self.theta_a = np.atleast_1d(theta_a)


@dataclass(frozen=True)
class FourBarDesign:
    b: float
    d: float
    gamma: float
    theta_D: float
    theta_0: float
    theta_A_grid: np.ndarray = None

    def __post_init__(self):
        if not (self.b > 0 and self.d > 0):
            raise ValueError(f"link lengths must be positive, got b={self.b}, d={self.d}")
        grid = self.theta_A_grid
        if grid is None:
            grid = crank_grid()
        object.__setattr__(self, "theta_A_grid", np.asarray(grid, dtype=float))

    @classmethod
    def from_vector(cls, x, theta_A_grid=None) -> "FourBarDesign":
        b, d, gamma, theta_D, theta_0 = np.asarray(x, dtype=float)
        return cls(b, d, gamma, theta_D, theta_0, theta_A_grid)


def crank_grid(n: int = TARGET_POINTS) -> np.ndarray:
    return np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)


def _path_terms(b, d, gamma, theta_D, theta_0, theta_a):
    """Coupler coordinates plus a mask of crank angles where the linkage closes.

    Design arguments broadcast against ``theta_a``.
    """
    a = A_CRANK
    c = b
    m = np.sqrt(a * a + d * d - 2.0 * a * d * np.cos(theta_a))
    with np.errstate(divide="ignore", invalid="ignore"):
        s_beta = a * np.sin(theta_a) / m
        c_b = (b * b + m * m - c * c) / (2.0 * b * m)
    ok = (m > 0) & (np.abs(s_beta) <= 1.0) & (np.abs(c_b) <= 1.0)
    beta = np.arcsin(np.clip(np.where(ok, s_beta, 0.0), -1.0, 1.0))
    theta_b = np.arccos(np.clip(np.where(ok, c_b, 1.0), -1.0, 1.0)) - beta
    theta_e = 0.5 * (np.pi - gamma)
    e = 2.0 * b * np.cos(theta_e)
    x = a * np.cos(theta_a + theta_0 + theta_D) + e * np.cos(theta_b + theta_e + theta_D)
    y = a * np.sin(theta_a + theta_0 + theta_D) + e * np.sin(theta_b + theta_e + theta_D)
    return x, y, ok


def coupler_path(design: FourBarDesign) -> np.ndarray:
    """Coupler point ``P`` over the crank sweep with the fixed pivot at the origin.

    Returns
    -------
    ndarray, shape (N, 2)

    Raises
    ------
    InfeasibleLinkage
        If the linkage cannot be assembled at some crank angle.
    """
    th = design.theta_A_grid
    x, y, ok = _path_terms(design.b, design.d, design.gamma, design.theta_D, design.theta_0, th)
    if not np.all(ok):
        bad = th[~ok]
        raise InfeasibleLinkage(f"linkage cannot close at theta_A = {bad[0]:.6g} "
                                f"({bad.size} of {th.size} angles)", bad)
    return np.column_stack((x, y))


def normalize_curve(points) -> np.ndarray:
    """Center each coordinate on its mean and divide by its range."""
    p = np.asarray(points, dtype=float)
    if p.ndim != 2 or p.shape[0] < 2 or p.shape[1] != 2:
        raise ValueError(f"need at least two (x, y) points, got shape {p.shape}")
    span = p.max(axis=0) - p.min(axis=0)
    if np.any(span == 0):
        raise ValueError("curve has zero range in a coordinate")
    return (p - p.mean(axis=0)) / span


def _normalize_rows(p):
    # p: (M, N) per coordinate
    span = p.max(axis=1, keepdims=True) - p.min(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        return (p - p.mean(axis=1, keepdims=True)) / span


def fourbar_objective(x, target_curve, theta_A_grid=None):
    """L1 distance between normalized target and coupler curves.

    ``x`` is one design vector or an ``(M, 5)`` batch. Designs that cannot
    close at some crank angle score ``1e6`` plus the number of such angles.
    """
    X = np.atleast_2d(np.asarray(x, dtype=float))
    th = crank_grid() if theta_A_grid is None else np.asarray(theta_A_grid, dtype=float)
    target = normalize_curve(target_curve)
    if target.shape[0] != th.size:
        raise ValueError(f"target has {target.shape[0]} points but the crank grid {th.size}")
    cols = [X[:, k:k + 1] for k in range(5)]
    px, py, ok = _path_terms(*cols, th[None, :])
    xh, yh = _normalize_rows(px), _normalize_rows(py)
    f = np.sum(np.abs(target[:, 0] - xh) + np.abs(target[:, 1] - yh), axis=1)
    nbad = np.count_nonzero(~ok, axis=1)
    f = np.where(nbad > 0, INFEASIBLE_PENALTY + nbad, f)
    # degenerate feasible curve (zero range) ranks just above all infeasible ones
    f = np.where(np.isfinite(f), f, INFEASIBLE_PENALTY + th.size + 1)
    return f[0] if np.ndim(x) == 1 else f


def write_curve(path, theta_a, points):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["theta_a", "x", "y"])
        for th, (px, py) in zip(theta_a, points):
            w.writerow([repr(float(th)), repr(float(px)), repr(float(py))])


def read_curve(path):
    """Return ``(theta_a, points)`` from a three-column csv with a header."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1:3]


def load_target():
    """The shipped target curve, generated from :data:`TARGET_DESIGN`."""
    ref = resources.files("cemethod.examples") / "data" / TARGET_FILE
    with resources.as_file(ref) as path:
        return read_curve(path)


def synthesis_problem(target_curve=None, theta_A_grid=None) -> ProblemSpec:
    if target_curve is None:
        theta_A_grid, target_curve = load_target()
    th = crank_grid() if theta_A_grid is None else np.asarray(theta_A_grid, dtype=float)
    target = np.asarray(target_curve, dtype=float)
    return ProblemSpec(lambda X: fourbar_objective(X, target, th), LOWER, UPPER,
                       is_vectorized=True)
