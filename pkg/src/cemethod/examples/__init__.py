"""Ready-to-run applied problems, registered under string keys.

Every example starts the search at the centre of its box with an initial
sigma of half the box width. The ``seed`` of the settings drives both the
solver and, where there is one, the synthetic dataset.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Tuple

import numpy as np

from ..constrained import ce_minimize_constrained, constraint_values, constraint_violation
from ..core import CeSettings, ProblemSpec, RunResult, default_settings
from ..solver import ce_minimize
from ..stats import RngStream
from . import fourbar, functions, oscillator, sindy


@dataclass
class ExampleOutcome:
    """Runs of one example plus a JSON-ready summary and optional datasets.

    ``datasets`` maps a file stem to ``(header, rows)``.
    """
    key: str
    runs: List[Tuple[str, RunResult]]
    summary: dict
    datasets: Dict[str, Tuple[List[str], np.ndarray]] = field(default_factory=dict)


@dataclass(frozen=True)
class Example:
    key: str
    description: str
    nvars: int
    runner: Callable[[CeSettings, int], ExampleOutcome]
    base: Callable[[], CeSettings]

    def default_settings(self) -> CeSettings:
        return self.base()

    def run(self, settings: CeSettings = None, workers: int = 1) -> ExampleOutcome:
        return self.runner(self.base() if settings is None else settings, workers)


def start_point(problem: ProblemSpec):
    lb, ub = problem.lower_bounds, problem.upper_bounds
    return 0.5 * (lb + ub), 0.5 * (ub - lb)


def _solve(problem: ProblemSpec, settings: CeSettings, workers: int) -> RunResult:
    x0, s0 = start_point(problem)
    if problem.is_constrained:
        return ce_minimize_constrained(problem, x0, s0, settings, RngStream(settings.seed),
                                       workers=workers)
    return ce_minimize(problem, x0, s0, settings, RngStream(settings.seed), workers=workers)


def _basic(key, problem_fn):
    def run(settings, workers):
        res = _solve(problem_fn(), settings, workers)
        return ExampleOutcome(key, [("", res)], {"xopt": res.xopt.tolist(), "fopt": res.fopt})
    return run


def _run_conic(settings, workers):
    problem = functions.conic_problem()
    res = _solve(problem, settings, workers)
    h, g = constraint_values(problem, res.xopt)
    summary = {"xopt": res.xopt.tolist(), "fopt": res.fopt, "H": h.tolist(), "G": g.tolist(),
               "violation": constraint_violation(h, g)}
    return ExampleOutcome("nonsmooth_conic", [("", res)], summary)


def oscillator_truth(seed: int) -> oscillator.OscillatorTruth:
    return oscillator.OscillatorTruth(seed=seed)


def _run_oscillator(settings, workers):
    truth = oscillator_truth(settings.seed)
    clean, noisy = oscillator.make_data(truth)
    res = _solve(oscillator.identification_problem(truth, noisy), settings, workers)
    names = ["omega_n", "zeta", "y0", "v0"]
    summary = {"xopt": res.xopt.tolist(), "fopt": res.fopt,
               "identified": dict(zip(names, res.xopt.tolist())),
               "truth": dict(zip(names, truth.params.tolist())),
               "noise_std": truth.noise_std}
    fitted = oscillator.simulate(res.xopt, truth.t_grid)
    data = np.column_stack((truth.t_grid, clean, noisy, fitted))
    return ExampleOutcome("oscillator_id", [("", res)], summary,
                          {"oscillator_data": (["t", "y_clean", "y_noisy", "y_fit"], data)})


def _run_fourbar(settings, workers):
    th, target = fourbar.load_target()
    res = _solve(fourbar.synthesis_problem(target, th), settings, workers)
    summary = {"xopt": res.xopt.tolist(), "fopt": res.fopt,
               "design": dict(zip(["b", "d", "gamma", "theta_D", "theta_0"], res.xopt.tolist()))}
    return ExampleOutcome("fourbar", [("", res)], summary)


def _run_sindy(settings, workers):
    cfg = sindy.SindyConfig()
    out = sindy.identify(cfg, settings.seed, settings)
    table = {name: dict(zip(sindy.STATE_NAMES, row)) for name, row in
             zip(sindy.DICTIONARY, out.xi.tolist())}
    raw = {name: dict(zip(sindy.STATE_NAMES, row)) for name, row in
           zip(sindy.DICTIONARY, out.xi_raw.tolist())}
    summary = {"coefficients": raw, "thresholded": table, "lambda": cfg.lam,
               "support": [sorted(s) for s in sindy.support(out.xi)]}
    runs = [(name, r) for name, r in zip(sindy.STATE_NAMES, out.runs)]
    data = np.column_stack((out.t, out.noisy))
    return ExampleOutcome("sindy_duffing", runs, summary,
                          {"duffing_data": (["t", "x1", "x2", "x3"], data)})


# the iteration budget spans all augmented-Lagrangian outer iterations
CONIC_MAX_ITER = 1000


def _sindy_base():
    cfg = sindy.SindyConfig()
    return default_settings(len(sindy.DICTIONARY)).replace(nsamp=cfg.nsamp)


EXAMPLES = {e.key: e for e in (
    Example("gaussmix1d", "1-D Gaussian mixture with a local and a global minimum", 1,
            _basic("gaussmix1d", functions.gaussmix_problem), lambda: default_settings(1)),
    Example("peaks", "Peaks surface on [-3, 3]^2", 2,
            _basic("peaks", functions.peaks_problem), lambda: default_settings(2)),
    Example("oscillator_id", "damped oscillator parameters from noisy displacement", 4,
            _run_oscillator, lambda: default_settings(4)),
    Example("fourbar", "four-bar linkage synthesis against the shipped target curve", 5,
            _run_fourbar, lambda: default_settings(5)),
    Example("nonsmooth_conic", "piecewise objective with conic equality and inequality", 2,
            _run_conic, lambda: default_settings(2).replace(max_iter=CONIC_MAX_ITER)),
    Example("sindy_duffing", "sparse identification of the forced Duffing oscillator", 10,
            _run_sindy, _sindy_base),
)}


def get_example(key: str) -> Example:
    try:
        return EXAMPLES[key]
    except KeyError:
        raise KeyError(f"unknown example {key!r}; known: {', '.join(EXAMPLES)}") from None
