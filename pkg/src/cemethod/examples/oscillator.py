"""Parameter identification of a free damped oscillator from noisy samples.

Model: ``y'' + 2 zeta omega_n y' + omega_n**2 y = 0`` with ``y(0) = y0``,
``y'(0) = v0``. The design vector is ``[omega_n, zeta, y0, v0]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import ProblemSpec
from .ode import IntegrationError, rk4_integrate, rk4_linear_propagator

# search box for [omega_n, zeta, y0, v0]
LOWER = np.array([0.5, 0.01, -2.0, -2.0])
UPPER = np.array([5.0, 0.5, 2.0, 2.0])
SUBSTEPS = 10


@dataclass(frozen=True)
class OscillatorTruth:
    omega_n: float = 2.0
    zeta: float = 0.1
    y0: float = 1.0
    v0: float = 0.0
    noise_std: float = 0.05
    t_grid: np.ndarray = field(default_factory=lambda: np.linspace(0.0, 10.0, 200))
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.zeta < 1.0:
            raise ValueError(f"zeta must lie in (0, 1), got {self.zeta}")
        object.__setattr__(self, "t_grid", np.asarray(self.t_grid, dtype=float))

    @property
    def params(self) -> np.ndarray:
        return np.array([self.omega_n, self.zeta, self.y0, self.v0])


def oscillator_analytic(truth: OscillatorTruth, t):
    """Closed-form underdamped response at times ``t``."""
    wn, z, y0, v0 = truth.omega_n, truth.zeta, truth.y0, truth.v0
    wd = wn * np.sqrt(1.0 - z * z)
    c = (v0 + z * wn * y0) / wd
    amp = np.sqrt(y0 * y0 + c * c)
    # atan2 keeps the quadrant so that y(0) = y0 for every sign of v0
    phase = np.arctan2(y0 * wd, v0 + z * wn * y0)
    t = np.asarray(t, dtype=float)
    return amp * np.exp(-z * wn * t) * np.sin(wd * t + phase)


def make_data(truth: OscillatorTruth):
    """Noise-free and noisy displacement samples on ``truth.t_grid``."""
    clean = oscillator_analytic(truth, truth.t_grid)
    rng = np.random.default_rng(truth.seed)
    return clean, clean + truth.noise_std * rng.standard_normal(clean.shape)


def _rhs(wn, z):
    c1 = 2.0 * z * wn
    c0 = wn * wn

    def rhs(t, y):
        return np.stack((y[1], -c1 * y[1] - c0 * y[0]))

    return rhs


def simulate(params, t_grid, substeps: int = SUBSTEPS) -> np.ndarray:
    """RK4 displacement on a uniform ``t_grid`` for one or many parameter rows.

    The step is ``dt / substeps``. Because the model is linear the RK4 step
    map is formed once per parameter row and applied as a matrix.

    ``params`` of shape ``(4,)`` gives ``(len(t_grid),)``; shape ``(M, 4)``
    gives ``(M, len(t_grid))``.
    """
    p = np.asarray(params, dtype=float)
    single = p.ndim == 1
    p = np.atleast_2d(p)
    t_grid = np.asarray(t_grid, dtype=float)
    dt = t_grid[1] - t_grid[0]
    A = np.zeros((p.shape[0], 2, 2))
    A[:, 0, 1] = 1.0
    A[:, 1, 0] = -p[:, 0] ** 2
    A[:, 1, 1] = -2.0 * p[:, 1] * p[:, 0]
    step = np.linalg.matrix_power(rk4_linear_propagator(A, dt / substeps), substeps)
    y = p[:, 2:4, None]
    disp = np.empty((p.shape[0], t_grid.size))
    disp[:, 0] = y[:, 0, 0]
    for k in range(1, t_grid.size):
        y = step @ y
        disp[:, k] = y[:, 0, 0]
    if not np.all(np.isfinite(disp)):
        raise IntegrationError("non-finite oscillator state", int(np.argmax(~np.isfinite(disp).all(0))))
    return disp[0] if single else disp


def simulate_stepped(params, t_grid, substeps: int = SUBSTEPS) -> np.ndarray:
    """Same model through the generic stepper; slower, kept as a cross-check."""
    p = np.atleast_2d(np.asarray(params, dtype=float))
    t_grid = np.asarray(t_grid, dtype=float)
    dt = t_grid[1] - t_grid[0]
    y0 = np.stack((p[:, 2], p[:, 3]))
    _, ys = rk4_integrate(_rhs(p[:, 0], p[:, 1]), y0, t_grid[0], t_grid[-1],
                          dt / substeps, stride=substeps)
    disp = ys[:, 0, :].T
    return disp[0] if np.ndim(params) == 1 else disp


def oscillator_misfit(params, t_grid, y_data) -> np.ndarray:
    """RMS residual ``||y_data - y_model|| / sqrt(N)`` per parameter row."""
    y_data = np.asarray(y_data, dtype=float)
    model = simulate(params, t_grid)
    return np.sqrt(np.mean((model - y_data) ** 2, axis=-1))


def identification_problem(truth: OscillatorTruth, y_data) -> ProblemSpec:
    t_grid = truth.t_grid

    def objective(X):
        return oscillator_misfit(X, t_grid, y_data)

    return ProblemSpec(objective, LOWER, UPPER, is_vectorized=True)
