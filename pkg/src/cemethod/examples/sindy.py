"""Sparse identification of the forced Duffing oscillator with CE.

The state is ``(x1, x2, x3)`` with ``x3`` the forcing phase, so the system
is autonomous. Coefficients of a ten-function dictionary are fitted one
state column at a time by minimizing

    J(xi) = ||xdot - Theta xi||_2 + lam * #{k : |xi_k| > z_tol}

and then thresholded at ``lam``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from ..core import CeSettings, ProblemSpec, RunResult, default_settings
from ..solver import ce_minimize
from ..stats import RngStream
from .ode import rk4_integrate

DICTIONARY = ("1", "x1", "x2", "x3", "x1^3", "x2^3", "x3^3", "cos x1", "cos x2", "cos x3")
STATE_NAMES = ("x1", "x2", "x3")
Z_TOL = 1e-10


@dataclass(frozen=True)
class SindyConfig:
    alpha: float = 1.0
    beta: float = -1.0
    delta: float = 0.3
    gamma: float = 0.65
    omega: float = 1.0
    initial_state: Tuple[float, float, float] = (1.0, 0.0, 0.0)
    t_span: Tuple[float, float] = (0.0, 100.0)
    step_h: float = 0.01
    sample_stride: int = 10
    noise_std: float = 0.01
    dictionary: Tuple[str, ...] = DICTIONARY
    lam: float = 0.25
    coef_bounds: Tuple[float, float] = (-2.0, 2.0)
    nsamp: int = 400

    def __post_init__(self):
        if tuple(self.dictionary) != DICTIONARY:
            raise ValueError(f"dictionary order is fixed to {DICTIONARY}")
        if self.lam < 0:
            raise ValueError(f"lam must be nonnegative, got {self.lam}")
        if not self.coef_bounds[0] < self.coef_bounds[1]:
            raise ValueError(f"invalid coefficient bounds {self.coef_bounds}")

    @property
    def sample_dt(self) -> float:
        return self.step_h * self.sample_stride


def true_coefficients(cfg: SindyConfig = SindyConfig()) -> np.ndarray:
    """The ``10 x 3`` coefficient matrix of the generating system."""
    xi = np.zeros((len(DICTIONARY), 3))
    xi[DICTIONARY.index("x2"), 0] = 1.0
    xi[DICTIONARY.index("x1"), 1] = cfg.alpha
    xi[DICTIONARY.index("x1^3"), 1] = cfg.beta
    xi[DICTIONARY.index("x2"), 1] = -cfg.delta
    xi[DICTIONARY.index("cos x3"), 1] = cfg.gamma
    xi[DICTIONARY.index("1"), 2] = cfg.omega
    return xi


def duffing_rhs(state, cfg: SindyConfig = SindyConfig()) -> np.ndarray:
    """Vector field; ``state`` has the three components on its first axis."""
    x1, x2, x3 = np.asarray(state, dtype=float)
    return np.stack((
        x2,
        cfg.alpha * x1 + cfg.beta * x1**3 - cfg.delta * x2 + cfg.gamma * np.cos(x3),
        np.full_like(x3, cfg.omega),
    ))


def simulate_duffing(cfg: SindyConfig = SindyConfig()):
    """Noise-free trajectory sampled every ``sample_stride`` RK4 steps.

    Returns ``t`` of shape ``(N,)`` and states of shape ``(N, 3)``.
    """
    t0, t1 = cfg.t_span
    t, y = rk4_integrate(lambda _t, s: duffing_rhs(s, cfg), np.asarray(cfg.initial_state, float),
                         t0, t1, cfg.step_h, stride=cfg.sample_stride)
    return t, y


def make_dataset(cfg: SindyConfig = SindyConfig(), seed: int = 0):
    """``(t, clean, noisy)`` with Gaussian noise of ``noise_std`` on every state."""
    t, clean = simulate_duffing(cfg)
    rng = np.random.default_rng(seed)
    return t, clean, clean + cfg.noise_std * rng.standard_normal(clean.shape)


def finite_difference(states, dt: float) -> np.ndarray:
    """Central differences inside, one-sided first-order differences at the ends."""
    return np.gradient(np.asarray(states, dtype=float), dt, axis=0, edge_order=1)


def build_dictionary(states) -> np.ndarray:
    """``Theta(X)`` with columns in :data:`DICTIONARY` order."""
    X = np.atleast_2d(np.asarray(states, dtype=float))
    x1, x2, x3 = X[:, 0], X[:, 1], X[:, 2]
    return np.column_stack((np.ones_like(x1), x1, x2, x3, x1**3, x2**3, x3**3,
                            np.cos(x1), np.cos(x2), np.cos(x3)))


def sindy_misfit(xi, theta, xdot_column, lam: float, z_tol: float = Z_TOL):
    """``J`` for one state column; ``xi`` may be one vector or ``(M, 10)`` rows."""
    xi = np.asarray(xi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    xdot_column = np.asarray(xdot_column, dtype=float)
    if theta.ndim != 2 or xi.shape[-1] != theta.shape[1] or xdot_column.shape != theta.shape[:1]:
        raise ValueError(f"shape mismatch: xi {xi.shape}, theta {theta.shape}, "
                         f"xdot {xdot_column.shape}")
    resid = theta @ np.atleast_2d(xi).T - xdot_column[:, None]
    out = np.linalg.norm(resid, axis=0) + lam * np.count_nonzero(np.abs(np.atleast_2d(xi)) > z_tol, axis=1)
    return out[0] if xi.ndim == 1 else out


def threshold_coefficients(xi, lam: float) -> np.ndarray:
    xi = np.array(xi, dtype=float)
    if lam < 0:
        raise ValueError(f"lam must be nonnegative, got {lam}")
    xi[np.abs(xi) < lam] = 0.0
    return xi


def support(xi) -> list:
    """Dictionary names of the nonzero entries, per state column."""
    xi = np.asarray(xi)
    return [{DICTIONARY[k] for k in np.flatnonzero(xi[:, j])} for j in range(xi.shape[1])]


@dataclass
class SindyResult:
    xi_raw: np.ndarray
    xi: np.ndarray
    runs: list
    t: np.ndarray = field(repr=False)
    noisy: np.ndarray = field(repr=False)


def column_problem(theta, xdot_column, cfg: SindyConfig) -> ProblemSpec:
    lo, hi = cfg.coef_bounds
    n = theta.shape[1]
    return ProblemSpec(lambda X: sindy_misfit(X, theta, xdot_column, cfg.lam),
                       np.full(n, lo), np.full(n, hi), is_vectorized=True)


def identify(cfg: SindyConfig = SindyConfig(), seed: int = 0,
             settings: Optional[CeSettings] = None) -> SindyResult:
    """Generate data with ``seed`` and fit each state column by CE.

    Column ``j`` uses the RNG substream keyed ``j`` of ``RngStream(seed)``.
    The initial mean is zero and the initial sigma half the bound width.
    """
    t, _, noisy = make_dataset(cfg, seed)
    theta = build_dictionary(noisy)
    xdot = finite_difference(noisy, cfg.sample_dt)
    n = theta.shape[1]
    if settings is None:
        settings = default_settings(n).replace(nsamp=cfg.nsamp, seed=seed)
    lo, hi = cfg.coef_bounds
    root = RngStream(seed)
    runs = []
    for j in range(xdot.shape[1]):
        problem = column_problem(theta, xdot[:, j], cfg)
        runs.append(ce_minimize(problem, np.zeros(n), np.full(n, 0.5 * (hi - lo)),
                                settings, root.child(j)))
    xi_raw = np.column_stack([r.xopt for r in runs])
    return SindyResult(xi_raw, threshold_coefficients(xi_raw, cfg.lam), runs, t, noisy)
