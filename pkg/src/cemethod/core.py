"""Problem, settings and result containers shared by the solvers."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Tuple

import numpy as np

Objective = Callable[[np.ndarray], object]


class ProblemError(ValueError):
    """Raised when a problem definition is malformed."""


class SettingsError(ValueError):
    """Raised when solver settings are out of range or unknown."""


@dataclass(frozen=True)
class Constraints:
    """Nonlinear constraint callables.

    ``equality(x)`` returns the H values that must vanish and
    ``inequality(x)`` the G values that must be non-positive. Either may be
    ``None``. With a vectorized problem both receive an ``(N, n)`` batch and
    return ``(N, k)``; otherwise a single point and a length-``k`` vector.
    """

    equality: Optional[Objective] = None
    inequality: Optional[Objective] = None


@dataclass(frozen=True)
class ProblemSpec:
    objective: Objective
    lower_bounds: np.ndarray
    upper_bounds: np.ndarray
    constraints: Optional[Constraints] = None
    is_vectorized: bool = False

    def __post_init__(self):
        lb = np.atleast_1d(np.asarray(self.lower_bounds, dtype=float)).copy()
        ub = np.atleast_1d(np.asarray(self.upper_bounds, dtype=float)).copy()
        lb.flags.writeable = False
        ub.flags.writeable = False
        object.__setattr__(self, "lower_bounds", lb)
        object.__setattr__(self, "upper_bounds", ub)

    @property
    def nvars(self) -> int:
        return int(self.lower_bounds.size)

    @property
    def is_constrained(self) -> bool:
        c = self.constraints
        return c is not None and (c.equality is not None or c.inequality is not None)

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower_bounds) and np.all(x <= self.upper_bounds))


def validate_problem(problem: ProblemSpec) -> ProblemSpec:
    """Check the box of ``problem`` and return it unchanged.

    Raises
    ------
    ProblemError
        On a dimension mismatch between the bound vectors, a non-finite
        bound, or ``lb[k] >= ub[k]``. The message names the offending index.
    """
    lb, ub = problem.lower_bounds, problem.upper_bounds
    if lb.ndim != 1 or ub.ndim != 1 or lb.size != ub.size:
        raise ProblemError(
            f"dimension mismatch: lower_bounds has length {lb.size}, "
            f"upper_bounds has length {ub.size}"
        )
    if lb.size == 0:
        raise ProblemError("problem must have at least one variable")
    for k in range(lb.size):
        if not (math.isfinite(lb[k]) and math.isfinite(ub[k])):
            raise ProblemError(f"non-finite bound at index {k}: [{lb[k]}, {ub[k]}]")
        if lb[k] >= ub[k]:
            raise ProblemError(
                f"lower bound not below upper bound at index {k}: "
                f"{lb[k]} >= {ub[k]}"
            )
    if not callable(problem.objective):
        raise ProblemError("objective must be callable")
    return problem


def resolve_elite_count(nsamp: int, elite_factor: float) -> int:
    """Number of elite samples, ``max(ceil(elite_factor * nsamp), 2)``."""
    if nsamp < 2:
        raise SettingsError(f"nsamp must be at least 2, got {nsamp}")
    if not 0.0 < elite_factor < 1.0:
        raise SettingsError(f"elite_factor must lie in (0, 1), got {elite_factor}")
    count = max(math.ceil(elite_factor * nsamp), 2)
    if count > nsamp:
        raise SettingsError(
            f"elite count {count} exceeds nsamp {nsamp}; lower elite_factor"
        )
    return count


@dataclass(frozen=True)
class CeSettings:
    """Tunables of the cross-entropy solvers.

    ``max_fcount=None`` means no evaluation budget. ``tol_abs`` holds one
    absolute tolerance per design variable.
    """

    nsamp: int = 100
    elite_factor: float = 0.05
    max_iter: int = 100
    max_stall: int = 50
    max_fcount: Optional[int] = None
    min_fval: float = -math.inf
    tol_abs: Tuple[float, ...] = (1e-6,)
    tol_rel: float = 1e-3
    tol_con: float = 1e-3
    tol_fun: float = 1e-6
    alpha: float = 0.7
    beta: float = 0.8
    q: int = 5
    initial_penalty: float = 10.0
    penalty_factor: float = 10.0
    penalty_cap: float = 1e8
    verbose: bool = False
    seed: int = 0

    def __post_init__(self):
        tol_abs = self.tol_abs
        if np.isscalar(tol_abs):
            tol_abs = (tol_abs,)
        object.__setattr__(self, "tol_abs", tuple(float(v) for v in tol_abs))
        self._check()

    def _check(self):
        def need(cond, msg):
            if not cond:
                raise SettingsError(msg)

        need(isinstance(self.nsamp, int) and self.nsamp >= 2, f"nsamp must be an integer >= 2, got {self.nsamp!r}")
        resolve_elite_count(self.nsamp, self.elite_factor)
        need(self.max_iter >= 1, f"max_iter must be positive, got {self.max_iter}")
        need(self.max_stall >= 1, f"max_stall must be positive, got {self.max_stall}")
        need(self.max_fcount is None or self.max_fcount >= 1,
             f"max_fcount must be positive or None, got {self.max_fcount}")
        need(len(self.tol_abs) >= 1 and all(v > 0 for v in self.tol_abs),
             f"tol_abs entries must be positive, got {self.tol_abs}")
        need(self.tol_rel > 0, f"tol_rel must be positive, got {self.tol_rel}")
        need(self.tol_con > 0, f"tol_con must be positive, got {self.tol_con}")
        need(self.tol_fun > 0, f"tol_fun must be positive, got {self.tol_fun}")
        need(0.0 < self.alpha <= 1.0, f"alpha must lie in (0, 1], got {self.alpha}")
        need(self.beta >= 0.0, f"beta must be nonnegative, got {self.beta}")
        need(isinstance(self.q, int) and self.q >= 1, f"q must be an integer >= 1, got {self.q!r}")
        need(self.initial_penalty > 0, f"initial_penalty must be positive, got {self.initial_penalty}")
        need(self.penalty_factor > 1, f"penalty_factor must exceed 1, got {self.penalty_factor}")
        need(self.penalty_cap > 0, f"penalty_cap must be positive, got {self.penalty_cap}")
        need(isinstance(self.seed, int) and self.seed >= 0, f"seed must be an unsigned integer, got {self.seed!r}")

    @property
    def elite_count(self) -> int:
        return resolve_elite_count(self.nsamp, self.elite_factor)

    def tol_abs_for(self, nvars: int) -> np.ndarray:
        """Absolute tolerances broadcast to ``nvars`` components."""
        if len(self.tol_abs) == 1:
            return np.full(nvars, self.tol_abs[0])
        if len(self.tol_abs) != nvars:
            raise SettingsError(
                f"tol_abs has {len(self.tol_abs)} entries for {nvars} variables"
            )
        return np.asarray(self.tol_abs, dtype=float)

    def replace(self, **changes) -> "CeSettings":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["tol_abs"] = list(self.tol_abs)
        return d

    @classmethod
    def from_dict(cls, data: dict, base: Optional["CeSettings"] = None) -> "CeSettings":
        """Build settings from a mapping; unknown keys are rejected."""
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise SettingsError(f"unknown settings key(s): {', '.join(unknown)}")
        values = dict(data)
        if "tol_abs" in values and not np.isscalar(values["tol_abs"]):
            values["tol_abs"] = tuple(values["tol_abs"])
        if base is None:
            return cls(**values)
        return dataclasses.replace(base, **values)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def loads(cls, text: str, base: Optional["CeSettings"] = None) -> "CeSettings":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise SettingsError("settings file must hold a JSON object")
        return cls.from_dict(data, base=base)

    @classmethod
    def load(cls, path, base: Optional["CeSettings"] = None) -> "CeSettings":
        return cls.loads(Path(path).read_text(), base=base)


def default_settings(nvars: int) -> CeSettings:
    """Default settings for an ``nvars``-dimensional problem."""
    if nvars < 1:
        raise SettingsError(f"nvars must be at least 1, got {nvars}")
    return CeSettings(max_iter=100 * nvars, tol_abs=(1e-6,) * nvars)


@dataclass(frozen=True)
class IterationRecord:
    iter: int
    xmean: np.ndarray
    xmedian: np.ndarray
    xbest: np.ndarray
    fmean: float
    fmedian: float
    fbest: float
    sigma: np.ndarray
    error_s: float
    error_c: float
    fcount: int
    gamma: float = math.nan

    VECTOR_FIELDS = ("xmean", "xmedian", "xbest", "sigma")

    def to_dict(self) -> dict:
        d = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            d[f.name] = [float(a) for a in v] if f.name in self.VECTOR_FIELDS else v
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "IterationRecord":
        kw = {f.name: d[f.name] for f in dataclasses.fields(cls) if f.name in d}
        for name in cls.VECTOR_FIELDS:
            kw[name] = np.asarray(kw[name], dtype=float)
        return cls(**kw)

    def __eq__(self, other):
        if not isinstance(other, IterationRecord):
            return NotImplemented
        a, b = self.to_dict(), other.to_dict()
        return all(_same(a[k], b[k]) for k in a)


def _same(a, b) -> bool:
    if isinstance(a, list):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, float) and isinstance(b, float) and math.isnan(a) and math.isnan(b):
        return True
    return a == b


EXIT_MESSAGES = {
    1: "maximum number of iterations reached",
    2: "solution stalled",
    3: "maximum number of function evaluations reached",
    4: "objective function tolerance achieved",
    5: "standard deviation convergence",
    6: "minimum function value criterion met",
}


@dataclass
class RunResult:
    xopt: np.ndarray
    fopt: float
    exit_flag: int
    convergence_status: bool
    history: list = field(default_factory=list)
    settings_echo: Optional[CeSettings] = None

    @property
    def message(self) -> str:
        return EXIT_MESSAGES[self.exit_flag]

    @property
    def niter(self) -> int:
        return len(self.history)

    @property
    def fcount(self) -> int:
        return self.history[-1].fcount if self.history else 0

    def column(self, name: str) -> np.ndarray:
        """Stack one history field over iterations."""
        return np.array([getattr(r, name) for r in self.history])

