"""Cross-entropy minimization over a box."""

from __future__ import annotations

import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import CeSettings, IterationRecord, ProblemError, ProblemSpec, RunResult, default_settings, validate_problem
from .stats import (
    RngStream,
    TruncatedNormalSpec,
    elite_select,
    error_weights,
    mle_mean,
    mle_std,
    sample_truncated_normal,
    wrms_norm,
)

SIGMA_FLOOR = 1e-12
SUCCESS_FLAGS = (4, 5, 6)


class ObjectiveEvaluationError(RuntimeError):
    """The objective raised while evaluating a sample batch.

    ``history`` holds the iteration records completed before the failure.
    """

    def __init__(self, message, iteration, history):
        super().__init__(message)
        self.iteration = iteration
        self.history = history


def dynamic_beta(t: int, beta: float, q: int) -> float:
    """Sigma smoothing weight at iteration ``t``: ``beta - beta*(1 - 1/t)**q``."""
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    return beta - beta * (1.0 - 1.0 / t) ** q


def smooth_mean(mu_tilde, mu_prev, alpha: float) -> np.ndarray:
    return alpha * np.asarray(mu_tilde, dtype=float) + (1.0 - alpha) * np.asarray(mu_prev, dtype=float)


def smooth_sigma(sigma_tilde, sigma_prev, beta_t: float) -> np.ndarray:
    return beta_t * np.asarray(sigma_tilde, dtype=float) + (1.0 - beta_t) * np.asarray(sigma_prev, dtype=float)


@dataclass
class SolverState:
    t: int
    mu_hat: np.ndarray
    sigma_hat: np.ndarray
    xbest: np.ndarray
    fbest: float = math.inf
    stall: int = 0
    fcount: int = 0
    prev_sigma: Optional[np.ndarray] = None
    history: list = field(default_factory=list)

    def fbest_window(self, length: int) -> list:
        return [r.fbest for r in self.history[-length:]]


def check_stopping(state: SolverState, settings: CeSettings, error_s: float,
                   fbest_window: Sequence[float]) -> Optional[int]:
    """First satisfied exit flag in priority order 6, 4, 5, 3, 2, 1, else None."""
    if state.fbest <= settings.min_fval:
        return 6
    if len(fbest_window) >= settings.max_stall:
        w = fbest_window[-settings.max_stall:]
        if max(w) - min(w) <= settings.tol_fun:
            return 4
    if error_s <= 1.0:
        return 5
    if settings.max_fcount is not None and state.fcount >= settings.max_fcount:
        return 3
    if state.stall >= settings.max_stall:
        return 2
    if state.t >= settings.max_iter:
        return 1
    return None


def convergence_status(exit_flag: int, fbest_window: Sequence[float],
                       settings: CeSettings) -> bool:
    if exit_flag in SUCCESS_FLAGS:
        return True
    if exit_flag == 2 and len(fbest_window) > 0:
        return max(fbest_window) - min(fbest_window) <= settings.tol_fun
    return False


def evaluate_batch(fun: Callable, points: np.ndarray, vectorized: bool,
                   workers: int = 1) -> np.ndarray:
    """Objective values of every row of ``points``, in row order."""
    if vectorized:
        values = np.asarray(fun(points), dtype=float).reshape(-1)
        if values.size != points.shape[0]:
            raise ValueError(
                f"vectorized objective returned {values.size} values for {points.shape[0]} points"
            )
        return values
    out = np.empty(points.shape[0])
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for i, v in enumerate(pool.map(fun, points)):
                out[i] = float(v)
    else:
        for i, x in enumerate(points):
            out[i] = float(fun(x))
    return out


def format_iteration(rec: IterationRecord, extra: Sequence[float] = ()) -> str:
    cols = [f"{rec.iter:6d}", f"{rec.fbest: .8e}", f"{rec.fmean: .8e}",
            f"{rec.error_s: .4e}", f"{rec.fcount:9d}"]
    cols += [f"{v: .4e}" for v in extra]
    return " ".join(cols)


def ce_minimize(problem: ProblemSpec, xmean0, sigma0, settings: Optional[CeSettings] = None,
                rng: Optional[RngStream] = None, *, workers: int = 1,
                callback: Optional[Callable[[IterationRecord], None]] = None) -> RunResult:
    """Minimize ``problem.objective`` over its box with the cross-entropy method.

    Every iteration draws ``nsamp`` truncated-normal points, keeps the
    ``elite_count`` best, refits mean and standard deviation to them and
    blends the refit with the previous parameters (``alpha`` for the mean,
    the decaying :func:`dynamic_beta` for sigma). The best point over all
    evaluated samples is returned.

    Parameters
    ----------
    problem : ProblemSpec
        Objective and box; constraints, if any, are ignored here.
    xmean0, sigma0 : array_like
        Initial mean (inside the box) and positive initial std.
    settings : CeSettings, optional
        Defaults to ``default_settings(problem.nvars)``.
    rng : RngStream, optional
        Defaults to ``RngStream(settings.seed)``. Iteration ``t`` draws from
        the child stream keyed ``t``.
    workers : int
        Threads used to evaluate a non-vectorized objective. Results do not
        depend on this value.
    callback : callable, optional
        Called with each new :class:`IterationRecord`.
    """
    validate_problem(problem)
    n = problem.nvars
    if settings is None:
        settings = default_settings(n)
    if rng is None:
        rng = RngStream(settings.seed)
    lb, ub = problem.lower_bounds, problem.upper_bounds

    mu = np.broadcast_to(np.asarray(xmean0, dtype=float), (n,)).copy()
    sigma = np.broadcast_to(np.asarray(sigma0, dtype=float), (n,)).copy()
    if not problem.contains(mu):
        raise ProblemError(f"initial mean {mu} lies outside the box")
    if np.any(~(sigma > 0)):
        raise ProblemError(f"initial sigma must be positive, got {sigma}")

    tol_abs = settings.tol_abs_for(n)
    sigma_floor = SIGMA_FLOOR * (ub - lb)
    n_elite = settings.elite_count
    state = SolverState(t=0, mu_hat=mu, sigma_hat=sigma, xbest=mu.copy())

    while True:
        state.t += 1
        t = state.t
        points = sample_truncated_normal(
            TruncatedNormalSpec(state.mu_hat, state.sigma_hat, lb, ub),
            settings.nsamp, rng.generator(t))
        try:
            values = evaluate_batch(problem.objective, points, problem.is_vectorized, workers)
        except Exception as exc:
            raise ObjectiveEvaluationError(
                f"objective evaluation failed at iteration {t}: {exc!r}", t, list(state.history)
            ) from exc
        state.fcount += points.shape[0]

        idx, gamma = elite_select(values, n_elite)
        elite = points[idx]
        elite_f = values[idx]
        mu_tilde = mle_mean(elite)
        sigma_tilde = mle_std(elite, mu_tilde)

        prev_sigma = state.sigma_hat
        state.prev_sigma = prev_sigma
        state.mu_hat = smooth_mean(mu_tilde, state.mu_hat, settings.alpha)
        beta_t = dynamic_beta(t, settings.beta, settings.q)
        state.sigma_hat = np.maximum(smooth_sigma(sigma_tilde, prev_sigma, beta_t), sigma_floor)
        error_s = wrms_norm(state.sigma_hat - prev_sigma,
                            error_weights(prev_sigma, tol_abs, settings.tol_rel))

        # idx[0] is the smallest value of the batch (NaN sorts last)
        k = idx[0]
        fprev = state.fbest
        if values[k] < state.fbest:
            state.fbest = float(values[k])
            state.xbest = points[k].copy()
        if fprev - state.fbest <= settings.tol_fun:
            state.stall += 1
        else:
            state.stall = 0

        rec = IterationRecord(
            iter=t,
            xmean=state.mu_hat.copy(),
            xmedian=np.median(elite, axis=0),
            xbest=state.xbest.copy(),
            fmean=float(np.mean(elite_f)),
            fmedian=float(np.median(elite_f)),
            fbest=state.fbest,
            sigma=state.sigma_hat.copy(),
            error_s=error_s,
            error_c=0.0,
            fcount=state.fcount,
            gamma=gamma,
        )
        state.history.append(rec)
        if callback is not None:
            callback(rec)
        if settings.verbose and callback is None:
            print(format_iteration(rec), file=sys.stdout)

        window = state.fbest_window(settings.max_stall)
        flag = check_stopping(state, settings, error_s, window)
        if flag is not None:
            break

    return RunResult(
        xopt=state.xbest,
        fopt=state.fbest,
        exit_flag=flag,
        convergence_status=convergence_status(flag, window, settings),
        history=state.history,
        settings_echo=settings,
    )
