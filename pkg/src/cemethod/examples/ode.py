"""Fixed-step classical Runge-Kutta integration."""

import numpy as np


class IntegrationError(ArithmeticError):
    def __init__(self, message, step):
        super().__init__(message)
        self.step = step


def rk4_step(rhs, t, y, h):
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_integrate(rhs, y0, t0, t1, h, stride=1):
    """Integrate ``y' = rhs(t, y)`` from ``t0`` to ``t1`` with step ``h``.

    ``y0`` may carry trailing batch axes; ``rhs`` must accept them. The
    step count is ``round((t1 - t0) / h)`` and ``h`` is adjusted so the last
    step lands on ``t1``.

    Returns
    -------
    t : ndarray, shape (K,)
        Times of the stored states, every ``stride``-th step including ``t0``.
    y : ndarray, shape (K,) + y0.shape

    Raises
    ------
    IntegrationError
        If the state becomes non-finite; ``.step`` is the failing step index.
    """
    if not h > 0:
        raise ValueError(f"step must be positive, got {h}")
    span = t1 - t0
    if span / h < 1.0 - 1e-9:
        raise ValueError(f"interval [{t0}, {t1}] is shorter than one step of {h}")
    nsteps = max(1, int(round(span / h)))
    h = span / nsteps
    y = np.array(y0, dtype=float)
    ts = [t0]
    ys = [y.copy()]
    for i in range(1, nsteps + 1):
        t = t0 + (i - 1) * h
        y = rk4_step(rhs, t, y, h)
        if not np.all(np.isfinite(y)):
            raise IntegrationError(f"non-finite state at step {i} (t={t + h})", i)
        if i % stride == 0:
            ts.append(t0 + i * h)
            ys.append(y)
    return np.array(ts), np.stack(ys)


def rk4_linear_propagator(A, h):
    """One classical RK4 step of ``y' = A y`` as a matrix.

    Applying :func:`rk4_step` to the identity gives the step map exactly, so
    ``y_{k+1} = M @ y_k`` reproduces the stepped scheme. ``A`` may be a stack
    of ``(n, n)`` matrices.
    """
    A = np.asarray(A, dtype=float)
    eye = np.broadcast_to(np.eye(A.shape[-1]), A.shape)
    return rk4_step(lambda t, Y: A @ Y, 0.0, eye, h)
