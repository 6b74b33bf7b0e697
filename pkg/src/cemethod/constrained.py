"""Augmented-Lagrangian outer loop around :func:`ce_minimize`."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .core import CeSettings, ProblemError, ProblemSpec, RunResult, default_settings, validate_problem
from .solver import SUCCESS_FLAGS, ce_minimize, format_iteration
from .stats import RngStream

SHIFT_FLOOR = 1e-8
BARRIER_EPS = 1e-6
MAX_OUTER = 20
RESTART_SHRINK = 0.5
RESTART_SIGMA_FLOOR = 1e-3


@dataclass(frozen=True)
class MultiplierState:
    lambda_e: np.ndarray
    lambda_i: np.ndarray
    nu: float
    outer_iter: int = 0

    def __post_init__(self):
        object.__setattr__(self, "lambda_e", np.atleast_1d(np.asarray(self.lambda_e, dtype=float)))
        object.__setattr__(self, "lambda_i", np.atleast_1d(np.asarray(self.lambda_i, dtype=float)))
        if not self.nu > 0:
            raise ValueError(f"penalty nu must be positive, got {self.nu}")


def shift_vector(m: MultiplierState) -> np.ndarray:
    """Barrier shifts ``lambda_i / nu`` floored at :data:`SHIFT_FLOOR`."""
    return np.maximum(m.lambda_i / m.nu, SHIFT_FLOOR)


def _barrier(s: np.ndarray, g: np.ndarray) -> np.ndarray:
    """``ln(s - g)`` with linear extrapolation once ``g >= s (1 - eps)``.

    ``s`` broadcasts against ``g`` along the last axis. Beyond the threshold
    the value continues along the tangent, so it stays finite and keeps
    decreasing as the violation grows.
    """
    g_thr = s * (1.0 - BARRIER_EPS)
    d_thr = s - g_thr  # = s * eps > 0
    safe = g < g_thr
    inside = np.log(np.where(safe, s - g, d_thr))
    outside = np.log(d_thr) - (g - g_thr) / d_thr
    return np.where(safe, inside, outside)


def _as_rows(values, npoints: int) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(npoints, -1) if npoints > 1 else arr.reshape(1, -1)
    return arr


def constraint_values(problem: ProblemSpec, x: np.ndarray):
    """Equality and inequality values at one point ``x``."""
    c = problem.constraints
    x = np.asarray(x, dtype=float)
    arg = x.reshape(1, -1) if problem.is_vectorized else x

    def one(fn):
        if c is None or fn is None:
            return np.zeros(0)
        return np.asarray(fn(arg), dtype=float).reshape(-1)

    return one(c.equality), one(c.inequality)


def constraint_violation(h_vals, g_vals) -> float:
    """Infinity norm of the violations: ``max(|H|, max(G, 0), 0)``."""
    h = np.abs(np.asarray(h_vals, dtype=float).reshape(-1))
    g = np.asarray(g_vals, dtype=float).reshape(-1)
    parts = [0.0]
    if h.size:
        parts.append(float(h.max()))
    if g.size:
        parts.append(float(np.maximum(g, 0.0).max()))
    return max(parts)


def augmented_objective(problem: ProblemSpec, m: MultiplierState):
    """Return the augmented Lagrangian of ``problem`` for multipliers ``m``.

    The returned callable follows ``problem.is_vectorized``.
    """
    c = problem.constraints
    eq = c.equality if c is not None else None
    ineq = c.inequality if c is not None else None
    lam_e, lam_i, nu = m.lambda_e, m.lambda_i, m.nu
    s = shift_vector(m)

    def batch(X):
        f = np.asarray(problem.objective(X), dtype=float).reshape(-1)
        npts = f.size
        if eq is not None:
            h = _as_rows(eq(X), npts)
            f = f + np.sum(lam_e * h + 0.5 * nu * h * h, axis=1)
        if ineq is not None:
            g = _as_rows(ineq(X), npts)
            f = f - np.sum(lam_i * s * _barrier(s, g), axis=1)
        return f

    if problem.is_vectorized:
        return batch

    def single(x):
        return float(batch(np.asarray(x, dtype=float))[0])

    return single


def update_multipliers(m: MultiplierState, h_vals, g_vals, penalty_factor: float,
                       penalty_cap: float) -> MultiplierState:
    """First-order multiplier step followed by a capped penalty increase."""
    h = np.asarray(h_vals, dtype=float).reshape(-1)
    g = np.asarray(g_vals, dtype=float).reshape(-1)
    if not (np.all(np.isfinite(h)) and np.all(np.isfinite(g))):
        raise ValueError("constraint values must be finite to update multipliers")
    return MultiplierState(
        lambda_e=m.lambda_e + m.nu * h,
        lambda_i=np.maximum(0.0, m.lambda_i + m.nu * g),
        nu=max(m.nu, min(penalty_factor * m.nu, penalty_cap)),
        outer_iter=m.outer_iter + 1,
    )


def initial_multipliers(n_eq: int, n_ineq: int, settings: CeSettings) -> MultiplierState:
    return MultiplierState(np.zeros(n_eq), np.ones(n_ineq), settings.initial_penalty)


def ce_minimize_constrained(problem: ProblemSpec, xmean0, sigma0,
                            settings: Optional[CeSettings] = None,
                            rng: Optional[RngStream] = None, *, workers: int = 1,
                            max_outer: int = MAX_OUTER,
                            multipliers: Optional[MultiplierState] = None) -> RunResult:
    """Minimize ``problem`` subject to its nonlinear constraints.

    Each outer iteration runs :func:`ce_minimize` on the augmented
    Lagrangian, measures the constraint violation at the inner optimum and
    either stops (violation within ``tol_con`` and the inner run converged)
    or updates the multipliers and restarts from the best point found with a
    halved initial sigma.

    The returned ``xopt`` is the lowest-objective point with violation at
    most ``tol_con`` observed in any inner iteration; if there is none, the
    least-violating one, and ``convergence_status`` is false. ``history``
    concatenates the inner histories with global iteration numbers; their
    ``fbest`` refers to the augmented objective of the respective outer
    iteration and ``error_c`` to the violation at that iteration's ``xbest``.

    ``max_iter`` and ``max_fcount`` bound the whole run, not each inner
    solve. ``multipliers`` overrides the initial ``lambda_e = 0``,
    ``lambda_i = 1``, ``nu = initial_penalty``.
    """
    validate_problem(problem)
    if not problem.is_constrained:
        raise ProblemError("problem has no constraints; use ce_minimize")
    n = problem.nvars
    if settings is None:
        settings = default_settings(n)
    if rng is None:
        rng = RngStream(settings.seed)
    lb, ub = problem.lower_bounds, problem.upper_bounds

    x0 = np.broadcast_to(np.asarray(xmean0, dtype=float), (n,)).copy()
    sigma_start = np.broadcast_to(np.asarray(sigma0, dtype=float), (n,)).copy()
    if not problem.contains(x0):
        raise ProblemError(f"initial mean {x0} lies outside the box")
    h0, g0 = constraint_values(problem, x0)
    mult = multipliers if multipliers is not None else initial_multipliers(h0.size, g0.size, settings)
    if mult.lambda_e.size != h0.size or mult.lambda_i.size != g0.size:
        raise ProblemError("multiplier sizes do not match the constraint counts")

    inner_settings = replace(settings, verbose=False)
    history = []
    total_fcount = 0
    best = None  # (fval, xopt) among feasible points
    least = None  # (violation, fval, x) fallback
    flag = 1
    converged = False
    mean = x0
    cache = {}

    def violation_at(x):
        key = x.tobytes()
        if key not in cache:
            h, g = constraint_values(problem, x)
            f = float(np.asarray(problem.objective(x.reshape(1, -1) if problem.is_vectorized else x),
                                 dtype=float).reshape(-1)[0])
            cache[key] = (constraint_violation(h, g), f)
        return cache[key]

    for k in range(max_outer):
        # iteration and evaluation budgets are global across outer iterations
        iters_left = settings.max_iter - len(history)
        if iters_left < 1:
            flag = 1
            break
        inner_settings = replace(inner_settings, max_iter=iters_left)
        if settings.max_fcount is not None:
            remaining = settings.max_fcount - total_fcount
            if remaining < 1:
                flag = 3
                break
            inner_settings = replace(inner_settings, max_fcount=remaining)
        sigma_k = np.maximum(sigma_start * RESTART_SHRINK ** k, RESTART_SIGMA_FLOOR * (ub - lb))
        inner_problem = ProblemSpec(augmented_objective(problem, mult), lb, ub,
                                    is_vectorized=problem.is_vectorized)
        offset = len(history)
        nu = mult.nu

        def on_iter(rec, offset=offset, nu=nu):
            viol, f = violation_at(rec.xbest)
            rec = replace(rec, iter=rec.iter + offset, error_c=viol,
                          fcount=rec.fcount + total_fcount)
            history.append(rec)
            if settings.verbose:
                print(format_iteration(rec, (viol, nu)), file=sys.stdout)

        inner = ce_minimize(inner_problem, mean, sigma_k, inner_settings, rng.child(k),
                            workers=workers, callback=on_iter)
        total_fcount += inner.fcount

        for rec in history[offset:]:
            viol, f = violation_at(rec.xbest)
            if viol <= settings.tol_con and (best is None or f < best[0]):
                best = (f, rec.xbest)
            if least is None or (viol, f) < least[:2]:
                least = (viol, f, rec.xbest)

        h, g = constraint_values(problem, inner.xopt)
        viol = constraint_violation(h, g)
        flag = inner.exit_flag
        if viol <= settings.tol_con and inner.exit_flag in SUCCESS_FLAGS:
            converged = True
            break
        if inner.exit_flag == 3:
            break
        if len(history) >= settings.max_iter:
            flag = 1
            break
        mult = update_multipliers(mult, h, g, settings.penalty_factor, settings.penalty_cap)
        mean = inner.xopt
        flag = 1
    if best is not None:
        fopt, xopt = best
    else:
        _, fopt, xopt = least
        converged = False

    return RunResult(
        xopt=np.asarray(xopt, dtype=float).copy(),
        fopt=float(fopt),
        exit_flag=flag,
        convergence_status=converged,
        history=history,
        settings_echo=settings,
    )
