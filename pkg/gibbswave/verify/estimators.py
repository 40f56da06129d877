"""
Self-normalized importance-sampling estimators.

All functions take per-sample LOG weights; they are exponentiated after
subtracting the maximum, so Gibbs weights far below exp(-700) are fine.
"""
from __future__ import annotations

import math
from typing import Tuple

import numpy as np

from gibbswave.core.errors import DomainError
from gibbswave.measures.rng import keyed_generator

# Key index of the bootstrap stream; sample streams use small indices.
BOOTSTRAP_STREAM = 2 ** 63


def normalized_weights(log_weights) -> np.ndarray:
    lw = np.asarray(log_weights, dtype=np.float64)
    if lw.ndim != 1 or lw.size == 0:
        raise DomainError("log_weights must be a non-empty 1-D sequence")
    w = np.exp(lw - lw.max())
    return w / np.sum(w)


def _paired(values, log_weights) -> Tuple[np.ndarray, np.ndarray]:
    x = np.asarray(values, dtype=np.float64)
    w = normalized_weights(log_weights)
    if x.shape != w.shape:
        raise DomainError(f"{x.size} values but {w.size} weights")
    return x, w


def weighted_mean_se(values, log_weights) -> Tuple[float, float]:
    """
    Self-normalized mean sum w_i x_i and its delta-method standard error
    sqrt(n/(n-1) * sum w_i^2 (x_i - mean)^2). Unit weights give the ordinary
    mean and s/sqrt(n).
    """
    x, w = _paired(values, log_weights)
    n = x.size
    if n < 2:
        raise DomainError("standard error needs at least 2 samples")
    mean = float(np.sum(w * x))
    var = n / (n - 1) * float(np.sum(w ** 2 * (x - mean) ** 2))
    return mean, math.sqrt(var)


def _sorted_cdf(x: np.ndarray, w: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    order = np.argsort(x, kind="stable")
    cdf = np.concatenate(([0.0], np.cumsum(w[order])))
    cdf[-1] = 1.0
    return x[order], cdf


def _ks(x: np.ndarray, wx: np.ndarray, y: np.ndarray, wy: np.ndarray) -> float:
    xs, cx = _sorted_cdf(x, wx)
    ys, cy = _sorted_cdf(y, wy)
    grid = np.concatenate((xs, ys))
    fx = cx[np.searchsorted(xs, grid, side="right")]
    fy = cy[np.searchsorted(ys, grid, side="right")]
    return float(np.max(np.abs(fx - fy)))


def weighted_ks(x, log_wx, y, log_wy) -> float:
    """sup_z |F_x(z) - F_y(z)| between the two weighted empirical CDFs."""
    x, wx = _paired(x, log_wx)
    y, wy = _paired(y, log_wy)
    return _ks(x, wx, y, wy)


def bootstrap_ks_threshold(
    x, log_wx, y, log_wy, resamples: int = 200, level: float = 0.99, seed: int = 0
) -> float:
    """
    ``level`` quantile of the weighted KS distance under the null: both groups
    are redrawn with replacement from the pooled (value, weight) pairs, with
    the original group sizes, ``resamples`` times.
    """
    if resamples < 1:
        raise DomainError(f"bootstrap needs at least one resample, got {resamples}")
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {level}")
    x, _ = _paired(x, log_wx)
    y, _ = _paired(y, log_wy)
    values = np.concatenate((x, y))
    lw = np.concatenate((np.asarray(log_wx, dtype=np.float64), np.asarray(log_wy, dtype=np.float64)))
    raw = np.exp(lw - lw.max())
    rng = keyed_generator(seed, BOOTSTRAP_STREAM)
    nx, ny = x.size, y.size
    stats = np.empty(resamples)
    for k in range(resamples):
        ix = rng.integers(0, values.size, nx)
        iy = rng.integers(0, values.size, ny)
        wx = raw[ix] / np.sum(raw[ix])
        wy = raw[iy] / np.sum(raw[iy])
        stats[k] = _ks(values[ix], wx, values[iy], wy)
    return float(np.quantile(stats, level))


def weighted_quantile(values, log_weights, q):
    """Inverse of the weighted empirical CDF at level(s) q in [0, 1]."""
    x, w = _paired(values, log_weights)
    q_arr = np.asarray(q, dtype=np.float64)
    if np.any((q_arr < 0.0) | (q_arr > 1.0)):
        raise DomainError(f"quantile levels must lie in [0, 1], got {q}")
    xs, cdf = _sorted_cdf(x, w)
    pos = np.clip(np.searchsorted(cdf[1:], q_arr, side="left"), 0, xs.size - 1)
    out = xs[pos]
    return float(out) if np.ndim(out) == 0 else out


def weighted_survival(values, log_weights, thresholds) -> np.ndarray:
    """sum_i w_i [x_i > lambda] for each lambda."""
    x, w = _paired(values, log_weights)
    lam = np.atleast_1d(np.asarray(thresholds, dtype=np.float64))
    return np.array([float(np.sum(w[x > l])) for l in lam])
