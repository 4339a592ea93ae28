"""Extreme value primitives: Pareto distribution, adaptive Hill estimator,
tail moment factor and the data-driven threshold rule.

All functions are pure and safe to call from multiple threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InfiniteMomentError, InsufficientDataError

DEFAULT_MIN_ORDER_STATS = 30


@dataclass(frozen=True)
class ParetoParams:
    """Pareto type II distribution with survival function (1 + x)^(-beta)."""

    beta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")


@dataclass(frozen=True)
class HillEstimate:
    """Tail-index estimate with the adaptively chosen order-statistic count."""

    gamma_hat: float
    k: int
    n: int


@dataclass(frozen=True)
class ThresholdRule:
    """Threshold selection: ``fixed`` overrides the automatic c0 * n^exponent rule."""

    c0: float = 0.25
    fixed: float | None = None

    def __post_init__(self):
        if not self.c0 > 0:
            raise ValueError(f"c0 must be positive, got {self.c0}")
        if self.fixed is not None and not self.fixed > 0:
            raise ValueError(f"fixed threshold must be positive, got {self.fixed}")


def pareto_cdf(x, beta: float):
    """CDF of the Pareto type II distribution, F(x) = 1 - (1 + x)^(-beta) for x >= 0."""
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    x = np.asarray(x, dtype=float)
    return np.where(x < 0, 0.0, 1.0 - (1.0 + np.maximum(x, 0.0)) ** (-beta))


def pareto_quantile(p, beta: float):
    """Inverse CDF of the Pareto type II distribution: (1 - p)^(-1/beta) - 1.

    Strictly increasing in p on [0, 1).
    """
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    p = np.asarray(p, dtype=float)
    if np.any(p < 0) or np.any(p >= 1):
        raise ValueError("quantile level must lie in [0, 1)")
    out = (1.0 - p) ** (-1.0 / beta) - 1.0
    return float(out) if out.ndim == 0 else out


def hill_gamma(norms_desc, k: int) -> float:
    """Hill statistic (1/k) sum_{j<=k} log(x_(j) / x_(k+1)) on descending data.

    Scale invariant: multiplying the input by any c > 0 leaves the value unchanged.
    """
    x = np.asarray(norms_desc, dtype=float)
    if x.ndim != 1:
        raise ValueError("expected a 1-d array of norms")
    if np.any(x <= 0):
        raise ValueError("all norms must be strictly positive")
    if np.any(np.diff(x) > 0):
        raise ValueError("norms must be sorted in nonincreasing order")
    if not 1 <= k <= x.size - 1:
        raise IndexError(f"k must lie in [1, {x.size - 1}], got {k}")
    logs = np.log(x[: k + 1])
    # anchor at the threshold order statistic so ties contribute exact zeros
    return float(np.mean(logs[:k] - logs[k]))


def _hill_path(logs_desc: np.ndarray) -> np.ndarray:
    """Hill statistics for all k = 1..n-1 given descending log-norms."""
    n = logs_desc.size
    i = np.arange(1, n)
    return np.cumsum(logs_desc)[:-1] / i - logs_desc[1:]


def _stability_radius(n: int) -> float:
    return float(np.sqrt(np.log(np.log(n))))


def adaptive_k(norms_desc, l_n: int = DEFAULT_MIN_ORDER_STATS, r: float | None = None) -> int:
    """Data-driven order-statistic count for the Hill estimator.

    Scans k upward from ``l_n`` and stops at the first k whose Hill statistic
    leaves the confidence band gamma(i) +/- gamma(i) * r / sqrt(i) of some
    earlier i <= k; returns that k minus one. If no k is ever rejected the
    convention is to return n - 1. The default radius is r = sqrt(log log n).
    """
    x = np.asarray(norms_desc, dtype=float)
    n = x.size
    if n <= l_n:
        raise InsufficientDataError(f"need more than l_n={l_n} observations, got {n}")
    if np.any(x <= 0):
        raise ValueError("all norms must be strictly positive")
    if np.any(np.diff(x) > 0):
        raise ValueError("norms must be sorted in nonincreasing order")
    if r is None:
        r = _stability_radius(n)

    logs = np.log(x)
    gam = _hill_path(logs - logs[0])  # shift-invariant; keeps tied inputs exact
    idx = np.arange(l_n, n)  # candidate k (and band indices i), using x_(k+1)
    g = gam[idx - 1]
    band = g * r / np.sqrt(idx)
    # running envelope over i <= k; k is rejected iff gamma(k) exits it
    lo = np.maximum.accumulate(g - band)
    hi = np.minimum.accumulate(g + band)
    rejected = (g > hi) | (g < lo)
    if not rejected.any():
        return n - 1
    return int(idx[np.argmax(rejected)]) - 1


def adaptive_hill(norms, l_n: int = DEFAULT_MIN_ORDER_STATS, r: float | None = None) -> HillEstimate:
    """Adaptive Hill estimate of the extreme value index gamma = 1/beta."""
    x = np.sort(np.asarray(norms, dtype=float))[::-1]
    k = adaptive_k(x, l_n=l_n, r=r)
    return HillEstimate(gamma_hat=hill_gamma(x, k), k=k, n=x.size)


def moment_factor(alpha_hat: float, gamma_hat: float) -> float:
    """Tail moment factor 1 / (1 - alpha_hat * gamma_hat).

    Requires alpha_hat * gamma_hat < 1; otherwise the limiting moment is infinite.
    """
    prod = alpha_hat * gamma_hat
    if prod >= 1:
        raise InfiniteMomentError(
            f"alpha_hat * gamma_hat = {prod:.6g} >= 1: tail moment does not exist"
        )
    return 1.0 / (1.0 - prod)


def select_threshold(n: int, gamma_hat: float, rule: ThresholdRule = ThresholdRule()) -> float:
    """Exceedance threshold c0 * n^(gamma / (1 + 2 min(1, gamma))), or the fixed override."""
    if rule.fixed is not None:
        return rule.fixed
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not gamma_hat >= 0:
        raise ValueError(f"gamma_hat must be nonnegative, got {gamma_hat}")
    exponent = gamma_hat / (1.0 + 2.0 * min(1.0, gamma_hat))
    return rule.c0 * n**exponent
