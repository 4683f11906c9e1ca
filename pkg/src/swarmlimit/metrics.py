"""Distributional and moment diagnostics for comparing particle clouds."""

from __future__ import annotations

import math

import numpy as np

KL_SMOOTHING = 1e-10


def _as_1d(points, name: str) -> np.ndarray:
    a = np.asarray(points, dtype=np.float64)
    if a.ndim == 2 and a.shape[1] == 1:
        a = a[:, 0]
    if a.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {a.shape}")
    if a.shape[0] < 1:
        raise ValueError(f"{name} must contain at least one sample")
    return a


def _as_cloud(points, name: str) -> np.ndarray:
    a = np.asarray(points, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2 or a.shape[0] < 1:
        raise ValueError(f"{name} must be an (n, dim) array, got shape {a.shape}")
    return a


def wasserstein2_1d(a, b) -> float:
    """Exact W2 between two equal-size 1-d samples via order statistics.

    Sorting both samples realizes the optimal coupling in one dimension, so
    W2 = sqrt( mean_i (a_(i) - b_(i))^2 ).
    """
    xa = _as_1d(a, "a")
    xb = _as_1d(b, "b")
    if xa.shape[0] != xb.shape[0]:
        raise ValueError(f"sample sizes differ: {xa.shape[0]} vs {xb.shape[0]}")
    diff = np.sort(xa) - np.sort(xb)
    return math.sqrt(float(np.mean(diff * diff)))


def paired_msq_gap(a, b) -> float:
    """Mean squared Euclidean distance between index-matched particles."""
    xa = _as_cloud(a, "a")
    xb = _as_cloud(b, "b")
    if xa.shape != xb.shape:
        raise ValueError(f"cloud shapes differ: {xa.shape} vs {xb.shape}")
    diff = xa - xb
    return float(np.mean(np.einsum("ij,ij->i", diff, diff)))


def default_bins(n: int) -> int:
    return max(2, math.ceil(math.sqrt(n)))


def kl_histogram(a, b, bins: int) -> float:
    """KL divergence between histogram densities on shared equal-width bins.

    Bins span the union range of both samples; masses get additive smoothing
    ``KL_SMOOTHING`` and renormalization so empty bins stay finite.  A fully
    degenerate range (all points identical in both clouds) returns 0.
    """
    xa = _as_1d(a, "a")
    xb = _as_1d(b, "b")
    if bins < 2:
        raise ValueError("bins must be >= 2")
    lo = min(xa.min(), xb.min())
    hi = max(xa.max(), xb.max())
    if lo == hi:
        return 0.0
    pa, _ = np.histogram(xa, bins=bins, range=(lo, hi))
    qb, _ = np.histogram(xb, bins=bins, range=(lo, hi))
    p = pa / pa.sum() + KL_SMOOTHING
    q = qb / qb.sum() + KL_SMOOTHING
    p /= p.sum()
    q /= q.sum()
    return float(np.sum(p * np.log(p / q)))


def empirical_moments(a) -> tuple[float, float]:
    """(mean |x|^2, mean |x|^4) of a cloud."""
    x = _as_cloud(a, "a")
    sq = np.einsum("ij,ij->i", x, x)
    return float(np.mean(sq)), float(np.mean(sq * sq))
