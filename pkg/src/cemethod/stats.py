"""Truncated-Gaussian sampling, elite selection and the estimator updates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special


class ZeroMassError(ValueError):
    """The truncation window carries no representable probability mass."""


def std_normal_cdf(z):
    """Standard normal CDF, saturating at 0 and 1 for extreme arguments."""
    return special.ndtr(z)


def std_normal_inv_cdf(p):
    """Inverse of :func:`std_normal_cdf` on the open interval (0, 1)."""
    arr = np.asarray(p, dtype=float)
    if np.any(~(arr > 0.0)) or np.any(~(arr < 1.0)):
        raise ValueError("probability must lie strictly inside (0, 1)")
    return special.ndtri(p)


class RngStream:
    """Deterministic, splittable random stream.

    One root seed; child streams are addressed by integer keys so that the
    draws of, say, iteration ``t`` never depend on how many draws other
    iterations made.
    """

    def __init__(self, seed: int = 0, key: tuple = ()):
        self.seed = int(seed)
        self.key = tuple(int(k) for k in key)

    def child(self, *key: int) -> "RngStream":
        return RngStream(self.seed, self.key + tuple(key))

    def generator(self, *key: int) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=self.key + tuple(int(k) for k in key))
        return np.random.Generator(np.random.PCG64(ss))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, key={self.key})"


@dataclass(frozen=True)
class TruncatedNormalSpec:
    mu: np.ndarray
    sigma: np.ndarray
    lb: np.ndarray
    ub: np.ndarray

    def __post_init__(self):
        for name in ("mu", "sigma", "lb", "ub"):
            object.__setattr__(self, name, np.atleast_1d(np.asarray(getattr(self, name), dtype=float)))
        n = self.mu.size
        if not (self.sigma.size == self.lb.size == self.ub.size == n):
            raise ValueError("mu, sigma, lb and ub must have equal length")
        if np.any(~(self.sigma > 0)):
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if np.any(~(self.lb < self.ub)):
            raise ValueError("lb must be strictly below ub")


def sample_truncated_normal(spec: TruncatedNormalSpec, count: int,
                            rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` points from independent truncated normals.

    Each component uses the inverse-CDF map ``mu + sigma * ndtri(u)`` with
    ``u`` uniform between the CDF values of the standardized bounds. Windows
    lying in the upper tail are mirrored to the lower tail first, where the
    CDF keeps its relative precision.

    Returns
    -------
    ndarray of shape ``(count, n)``, every row inside ``[lb, ub]``.
    """
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    mu, sigma, lb, ub = spec.mu, spec.sigma, spec.lb, spec.ub
    a = (lb - mu) / sigma
    b = (ub - mu) / sigma
    flip = a > 0
    lo = np.where(flip, -b, a)
    hi = np.where(flip, -a, b)
    plo = special.ndtr(lo)
    phi = special.ndtr(hi)
    if np.any(~(phi > plo)):
        k = int(np.flatnonzero(~(phi > plo))[0])
        raise ZeroMassError(
            f"truncation window of component {k} has no probability mass "
            f"(mu={mu[k]}, sigma={sigma[k]}, box=[{lb[k]}, {ub[k]}])"
        )
    u = rng.random((count, mu.size))
    p = plo + (phi - plo) * u
    # p can round onto 0 when plo is denormal; ndtri(0) = -inf is then clipped
    z = np.clip(special.ndtri(p), lo, hi)
    z = np.where(flip, -z, z)
    return np.clip(mu + sigma * z, lb, ub)


def elite_select(values, elite_count: int):
    """Indices of the ``elite_count`` smallest values and the threshold.

    NaN values are ordered as ``+inf``; ties are broken by sample index.

    Returns
    -------
    indices : ndarray of int
        Elite sample indices in ascending order of value.
    gamma : float
        The ``elite_count``-th smallest value.
    """
    v = np.asarray(values, dtype=float)
    if not 1 <= elite_count <= v.size:
        raise ValueError(f"elite_count must lie in [1, {v.size}], got {elite_count}")
    key = np.where(np.isnan(v), np.inf, v)
    order = np.argsort(key, kind="stable")
    idx = order[:elite_count]
    return idx, float(key[idx[-1]])


def mle_mean(elite_points) -> np.ndarray:
    x = np.asarray(elite_points, dtype=float)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValueError("need at least one elite point")
    return x.mean(axis=0)


def mle_std(elite_points, mu_hat) -> np.ndarray:
    """Biased (divide by N) standard deviation about ``mu_hat``."""
    x = np.asarray(elite_points, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("need at least two elite points")
    dev = x - np.asarray(mu_hat, dtype=float)
    return np.sqrt(np.mean(dev * dev, axis=0))


def error_weights(x, tol_abs, tol_rel: float) -> np.ndarray:
    return 1.0 / (np.asarray(tol_abs, dtype=float) + np.abs(np.asarray(x, dtype=float)) * tol_rel)


def wrms_norm(x, weights) -> float:
    x = np.asarray(x, dtype=float)
    w = np.asarray(weights, dtype=float)
    if x.shape != w.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {w.shape}")
    return float(np.sqrt(np.mean((w * x) ** 2)))
