#!/usr/bin/env python3
"""Recompute benchmark reference optima by brute force.

Scans a 4097 x 4097 grid over each domain, takes the best cells of
separated basins and polishes them with bounded Nelder-Mead. Prints the
minimum value and every polished minimizer within 1e-9 of it. The output
is what ``cemethod.benchmarks`` stores.

    python tools/reference_optima.py [name ...]
"""

import argparse

import numpy as np
from scipy.optimize import minimize

from cemethod import benchmarks

GRID = 4097
CHUNK = 256


def grid_scan(fn, domain, m=GRID):
    (a, b), (c, d) = domain
    xs = np.linspace(a, b, m)
    ys = np.linspace(c, d, m)
    vals = np.empty((m, m))
    for i in range(0, m, CHUNK):
        X, Y = np.meshgrid(xs[i:i + CHUNK], ys, indexing="ij")
        vals[i:i + CHUNK] = fn(np.stack([X, Y], axis=-1))
    return xs, ys, vals


def polish(fn, x0, domain):
    f = lambda z: float(fn(np.asarray(z)))
    res = minimize(f, x0, method="Nelder-Mead", bounds=domain,
                   options={"xatol": 1e-13, "fatol": 1e-15, "maxiter": 20000, "maxfev": 40000})
    x, fx = res.x, res.fun
    # a few rounds of shrinking coordinate search to settle on edges/kinks
    step = 1e-4 * max(hi - lo for lo, hi in domain)
    while step > 1e-14:
        moved = False
        for k in range(2):
            for sgn in (-1.0, 1.0):
                y = x.copy()
                y[k] = np.clip(y[k] + sgn * step, *domain[k])
                fy = f(y)
                if fy < fx:
                    x, fx, moved = y, fy, True
        if not moved:
            step *= 0.5
    return x, fx


def reference(name, n_starts=40):
    b = benchmarks.get(name)
    xs, ys, vals = grid_scan(b.fn, b.domain)
    order = np.argsort(vals, axis=None)
    starts = []
    sep = 0.01 * max(hi - lo for lo, hi in b.domain)
    for flat in order:
        i, j = np.unravel_index(flat, vals.shape)
        p = np.array([xs[i], ys[j]])
        if all(np.linalg.norm(p - q) > sep for q in starts):
            starts.append(p)
        if len(starts) >= n_starts:
            break
    polished = [polish(b.fn, p, b.domain) for p in starts]
    fmin = min(min(fx for _, fx in polished), vals.min())
    pts = []
    for x, fx in polished:
        if fx <= fmin + 1e-9 and all(np.linalg.norm(x - q) > 1e-3 for q in pts):
            pts.append(x)
    return fmin, vals.min(), pts


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="*")
    args = ap.parse_args()
    for name in args.names or benchmarks.list_benchmarks():
        fmin, gmin, pts = reference(name)
        print(f"{name}: min={fmin!r} grid_min={gmin!r}")
        for p in pts:
            print(f"    ({p[0]!r}, {p[1]!r})")


if __name__ == "__main__":
    main()
