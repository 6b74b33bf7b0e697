"""Command-line runner for benchmarks and examples.

Usage::

    python -m cemethod list [--json]
    python -m cemethod solve <benchmark-or-example> [settings flags]
    python -m cemethod example <key> [settings flags]
    python -m cemethod bench <name ...|all> [--repeats N] [settings flags]

Settings resolve as built-in defaults < ``CEOPT_SEED`` < ``--config`` file <
command-line flags.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import benchmarks
from .core import CeSettings, ProblemSpec, RunResult, SettingsError, default_settings
from .examples import EXAMPLES, get_example
from .solver import ce_minimize
from .stats import RngStream
from .trace import FORMATS, atomic_write, emit_trace, write_table

SEED_ENV = "CEOPT_SEED"
COMMANDS = ("solve", "bench", "example", "list")
# nsamp used by bench when neither the config nor a flag sets it
BENCH_NSAMP = {"easy": 200, "hard": 500}
EASY_PASS_RATE = 0.9

# flag name -> (settings field, type)
SETTING_FLAGS = {
    "nsamp": int, "elite_factor": float, "max_iter": int, "max_stall": int,
    "max_fcount": int, "min_fval": float, "tol_rel": float, "tol_con": float,
    "tol_fun": float, "alpha": float, "beta": float, "q": int,
}


@dataclass
class RunRequest:
    command: str
    target: Optional[str] = None
    names: List[str] = field(default_factory=list)
    settings_overrides: dict = field(default_factory=dict)
    seed: Optional[int] = None
    config: Optional[str] = None
    output_path: Optional[str] = None
    format: str = "jsonl"
    repeats: int = 20
    workers: int = 1
    json: bool = False


def _float_list(text: str):
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    return vals


def _settings_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("solver settings")
    g.add_argument("--seed", type=int, help=f"root seed (default: ${SEED_ENV} or 0)")
    for name, typ in SETTING_FLAGS.items():
        g.add_argument("--" + name.replace("_", "-"), dest=name, type=typ, metavar=typ.__name__.upper())
    g.add_argument("--tol-abs", dest="tol_abs", type=_float_list, metavar="A[,A...]",
                   help="absolute sigma tolerance, one value or one per variable")
    g.add_argument("--config", help="JSON settings file")
    g.add_argument("--verbose", action="store_true", default=None, help="print one line per iteration")
    g.add_argument("--output", dest="output_path", help="trace or summary file")
    g.add_argument("--format", choices=FORMATS, default="jsonl")
    g.add_argument("--workers", type=int, default=1,
                   help="threads for objective evaluation (solve) or repeats (bench)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parent = _settings_parent()
    parser = argparse.ArgumentParser(prog="cemethod", description="Cross-entropy optimizer runner.")
    sub = parser.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", parents=[parent], help="solve one benchmark or example")
    s.add_argument("target")
    e = sub.add_parser("example", parents=[parent], help="run a registered example")
    e.add_argument("target", choices=list(EXAMPLES))
    b = sub.add_parser("bench", parents=[parent], help="seeded benchmark runs with acceptance gate")
    b.add_argument("names", nargs="+", help="benchmark names or 'all'")
    b.add_argument("--repeats", type=int, default=20)
    ls = sub.add_parser("list", help="list benchmarks and examples")
    ls.add_argument("--json", action="store_true")
    return parser


def parse_args(argv=None) -> RunRequest:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.command == "list":
        return RunRequest("list", json=ns.json)
    overrides = {k: getattr(ns, k) for k in list(SETTING_FLAGS) + ["tol_abs", "verbose", "seed"]
                 if getattr(ns, k) is not None}
    try:
        CeSettings().replace(**overrides)
    except SettingsError as exc:
        parser.error(str(exc))
    if ns.workers < 1:
        parser.error("--workers must be at least 1")
    req = RunRequest(ns.command, settings_overrides=overrides, seed=ns.seed, config=ns.config,
                     output_path=ns.output_path, format=ns.format, workers=ns.workers)
    if ns.command == "bench":
        if ns.repeats < 1:
            parser.error("--repeats must be at least 1")
        names = benchmarks.list_benchmarks() if ns.names == ["all"] else ns.names
        unknown = [n for n in names if n not in benchmarks.REGISTRY]
        if unknown:
            parser.error(f"unknown benchmark(s): {', '.join(unknown)}")
        req.names, req.repeats = names, ns.repeats
    else:
        if ns.command == "solve" and ns.target not in benchmarks.REGISTRY and ns.target not in EXAMPLES:
            parser.error(f"unknown target {ns.target!r}; see 'cemethod list'")
        req.target = ns.target
    return req


def resolve_settings(req: RunRequest, base: CeSettings) -> CeSettings:
    s = base
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            s = s.replace(seed=int(env))
        except ValueError:
            raise SettingsError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    if req.config:
        s = CeSettings.load(req.config, base=s)
    return s.replace(**req.settings_overrides)


def _config_keys(req: RunRequest) -> set:
    if not req.config:
        return set()
    return set(json.loads(Path(req.config).read_text()))


def benchmark_problem(name: str) -> ProblemSpec:
    b = benchmarks.get(name)
    return ProblemSpec(b.fn, b.lower_bounds, b.upper_bounds, is_vectorized=True)


def benchmark_start(problem: ProblemSpec, seed: int):
    """Uniform start in the box from key 0 of the seed's stream; sigma is half the width."""
    lb, ub = problem.lower_bounds, problem.upper_bounds
    x0 = RngStream(seed).generator(0).uniform(lb, ub)
    return x0, 0.5 * (ub - lb)


def solve_benchmark(name: str, settings: CeSettings, workers: int = 1) -> RunResult:
    problem = benchmark_problem(name)
    x0, s0 = benchmark_start(problem, settings.seed)
    return ce_minimize(problem, x0, s0, settings, RngStream(settings.seed), workers=workers)


def benchmark_settings(name: str, req: RunRequest) -> CeSettings:
    base = default_settings(2)
    if "nsamp" not in req.settings_overrides and "nsamp" not in _config_keys(req):
        base = base.replace(nsamp=BENCH_NSAMP["easy" if name in benchmarks.EASY else "hard"])
    return resolve_settings(req, base)


@dataclass
class BenchRow:
    name: str
    group: str
    runs: int
    successes: int
    best_fbest: float
    median_fbest: float
    median_fcount: float
    median_iter: float
    ref_min_value: float
    ref_tolerance: float

    @property
    def success_rate(self) -> float:
        return self.successes / self.runs

    @property
    def passed(self) -> bool:
        if self.group == "easy":
            return self.success_rate >= EASY_PASS_RATE
        return abs(self.best_fbest - self.ref_min_value) <= self.ref_tolerance

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d.update(success_rate=self.success_rate, passed=self.passed)
        return d


def run_bench(names, repeats: int, settings_for, workers: int = 1) -> List[BenchRow]:
    """``repeats`` runs per benchmark with seeds ``seed + i``."""
    rows = []
    for name in names:
        b = benchmarks.get(name)
        base = settings_for(name)
        seeds = [base.seed + i for i in range(repeats)]

        def one(seed, name=name, base=base):
            return solve_benchmark(name, base.replace(seed=seed))

        if workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                results = list(pool.map(one, seeds))
        else:
            results = [one(s) for s in seeds]
        f = np.array([r.fopt for r in results])
        ok = np.abs(f - b.ref_min_value) <= b.ref_tolerance
        rows.append(BenchRow(name, "easy" if name in benchmarks.EASY else "hard", repeats,
                             int(ok.sum()), float(f.min()), float(np.median(f)),
                             float(np.median([r.fcount for r in results])),
                             float(np.median([r.niter for r in results])),
                             b.ref_min_value, b.ref_tolerance))
    return rows


def format_bench(rows: List[BenchRow]) -> str:
    head = f"{'benchmark':<18}{'set':<6}{'success':>9}{'best':>16}{'median':>16}{'fcount':>10}{'iter':>7}  gate"
    lines = [head]
    for r in rows:
        lines.append(f"{r.name:<18}{r.group:<6}{r.successes:>4}/{r.runs:<4}{r.best_fbest:>16.8g}"
                     f"{r.median_fbest:>16.8g}{r.median_fcount:>10.0f}{r.median_iter:>7.0f}  "
                     f"{'pass' if r.passed else 'FAIL'}")
    return "\n".join(lines)


def _bench_file(rows: List[BenchRow], fmt: str) -> str:
    dicts = [r.to_dict() for r in rows]
    if fmt == "jsonl":
        return "".join(json.dumps(d) + "\n" for d in dicts)
    keys = list(dicts[0])
    lines = [",".join(keys)] + [",".join(str(d[k]) for k in keys) for d in dicts]
    return "\n".join(lines) + "\n"


def _summary(result: RunResult, target: str) -> dict:
    return {"target": target, "xopt": [float(v) for v in result.xopt], "fopt": float(result.fopt),
            "exit_flag": result.exit_flag, "convergence_status": bool(result.convergence_status),
            "message": result.message, "niter": result.niter, "fcount": result.fcount}


def _trace_path(path: Path, label: str) -> Path:
    return path if not label else path.with_name(f"{path.stem}.{label}{path.suffix}")


def _run_example(req: RunRequest, out) -> int:
    ex = get_example(req.target)
    settings = resolve_settings(req, ex.default_settings())
    outcome = ex.run(settings, workers=req.workers)
    summary = {"target": ex.key, **outcome.summary,
               "runs": {label or ex.key: _summary(r, ex.key) for label, r in outcome.runs}}
    if req.output_path:
        path = Path(req.output_path)
        for label, r in outcome.runs:
            emit_trace(r, _trace_path(path, label), req.format)
        for stem, (header, data) in outcome.datasets.items():
            write_table(path.with_name(f"{path.stem}.{stem}.csv"), header, data)
    print(json.dumps(summary, indent=2), file=out)
    return 0


def _run_solve(req: RunRequest, out) -> int:
    if req.target in EXAMPLES and req.target not in benchmarks.REGISTRY:
        return _run_example(req, out)
    settings = resolve_settings(req, default_settings(2))
    result = solve_benchmark(req.target, settings, workers=req.workers)
    if req.output_path:
        emit_trace(result, req.output_path, req.format)
    print(json.dumps(_summary(result, req.target), indent=2), file=out)
    return 0


def _run_list(req: RunRequest, out) -> int:
    bench = [{"name": b.name, "domain": [list(d) for d in b.domain],
              "ref_min_value": b.ref_min_value} for b in (benchmarks.get(n) for n in benchmarks.list_benchmarks())]
    examples = [{"name": e.key, "nvars": e.nvars, "description": e.description} for e in EXAMPLES.values()]
    if req.json:
        print(json.dumps({"benchmarks": bench, "examples": examples}, indent=2), file=out)
        return 0
    print("benchmarks:", file=out)
    for b in bench:
        (a, c), (d, e) = b["domain"]
        print(f"  {b['name']:<18}[{a:g}, {c:g}] x [{d:g}, {e:g}]  min {b['ref_min_value']:.10g}", file=out)
    print("examples:", file=out)
    for e in examples:
        print(f"  {e['name']:<18}n={e['nvars']:<3}{e['description']}", file=out)
    return 0


def _run_bench(req: RunRequest, out) -> int:
    rows = run_bench(req.names, req.repeats, lambda n: benchmark_settings(n, req), req.workers)
    print(format_bench(rows), file=out)
    if req.output_path:
        atomic_write(req.output_path, _bench_file(rows, req.format))
    passed = all(r.passed for r in rows)
    print(f"gate: {'pass' if passed else 'FAIL'}", file=out)
    return 0 if passed else 1


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    req = parse_args(argv)
    handler = {"list": _run_list, "solve": _run_solve, "example": _run_example, "bench": _run_bench}
    try:
        return handler[req.command](req, out)
    except (SettingsError, OSError, json.JSONDecodeError) as exc:
        print(f"cemethod: error: {exc}", file=sys.stderr)
        return 2
