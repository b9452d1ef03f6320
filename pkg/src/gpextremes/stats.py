"""Distributional distance measures used by the verification experiments.

Kolmogorov-Smirnov statistics are computed directly from sorted samples
rather than through a p-value machinery: the experiments compare the
statistic against the asymptotic critical value c(level)/sqrt(n), which
keeps pass/fail thresholds explicit and reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, ParameterError

# Asymptotic critical constants for the Kolmogorov distribution:
# P(sup|F_n - F| > c/sqrt(n)) -> level.
KS_CRITICAL = {0.10: 1.224, 0.05: 1.358, 0.01: 1.628}


@dataclass(frozen=True)
class Ecdf:
    """Right-continuous empirical CDF of a finite sample."""

    points: np.ndarray

    def __post_init__(self):
        x = np.sort(np.asarray(self.points, dtype=float))
        if x.size == 0:
            raise DataError("empirical CDF needs at least one point")
        if not np.isfinite(x).all():
            raise DataError("empirical CDF sample contains non-finite values")
        object.__setattr__(self, "points", x)

    @property
    def n(self) -> int:
        return self.points.size

    def __call__(self, x) -> np.ndarray:
        return np.searchsorted(self.points, np.asarray(x, dtype=float), side="right") / self.n


def _critical(level: float) -> float:
    try:
        return KS_CRITICAL[level]
    except KeyError:
        raise ParameterError(
            f"level must be one of {sorted(KS_CRITICAL)}, got {level}"
        ) from None


@dataclass(frozen=True)
class KsResult:
    statistic: float
    critical: float

    @property
    def passed(self) -> bool:
        return self.statistic <= self.critical


def ks_one_sample(sample, cdf, level: float = 0.05) -> KsResult:
    """Sup distance between a sample's ECDF and a target CDF.

    ``cdf`` is a vectorized callable.  The sup over the step function is
    attained at a sample point from one side or the other, so both
    one-sided gaps are evaluated at the order statistics.
    """
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    if n == 0:
        raise DataError("one-sample test needs a nonempty sample")
    f = np.asarray(cdf(x), dtype=float)
    if f.shape != x.shape or np.any(f < -1e-12) or np.any(f > 1 + 1e-12):
        raise DataError("cdf callable must map the sample into [0, 1]")
    grid = np.arange(1, n + 1) / n
    d = max(float(np.max(grid - f)), float(np.max(f - (grid - 1.0 / n))))
    return KsResult(statistic=d, critical=_critical(level) / np.sqrt(n))


def ks_two_sample(a, b, level: float = 0.05) -> KsResult:
    """Sup distance between two ECDFs, with the two-sample critical value."""
    x = np.sort(np.asarray(a, dtype=float))
    y = np.sort(np.asarray(b, dtype=float))
    if x.size == 0 or y.size == 0:
        raise DataError("two-sample test needs two nonempty samples")
    joint = np.concatenate([x, y])
    fx = np.searchsorted(x, joint, side="right") / x.size
    fy = np.searchsorted(y, joint, side="right") / y.size
    d = float(np.max(np.abs(fx - fy)))
    m, n = x.size, y.size
    return KsResult(statistic=d, critical=_critical(level) * np.sqrt((m + n) / (m * n)))


def mc_stderr(sample) -> float:
    """Standard error of the sample mean (ddof=1), the half-width unit
    quoted alongside every Monte Carlo estimate."""
    x = np.asarray(sample, dtype=float)
    if x.size < 2:
        raise DataError("standard error needs at least two points")
    return float(np.std(x, ddof=1) / np.sqrt(x.size))
