"""
Goodness-of-fit: empirical CDF, Kolmogorov-Smirnov distance and sample moments
"""
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from distributions import SummaryStats
from errors import InvalidArgumentError


def _as_sample(values: Sequence[float], minimum: int = 1) -> np.ndarray:
    data = np.asarray(values, dtype=float).ravel()
    if data.size < minimum:
        raise InvalidArgumentError(f"Need at least {minimum} sample value(s), got {data.size}")
    if not np.all(np.isfinite(data)):
        raise InvalidArgumentError("Sample values must be finite")
    return data


@dataclass(frozen=True)
class EcdfFunction:
    """Right-continuous empirical distribution function"""
    values: np.ndarray
    n: int

    def __call__(self, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        counts = np.searchsorted(self.values, np.asarray(x, dtype=float), side='right')
        out = counts / self.n
        return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    density: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])


def ecdf(values: Sequence[float]) -> EcdfFunction:
    data = np.sort(_as_sample(values))
    return EcdfFunction(values=data, n=int(data.size))


def ks_distance(samples: Sequence[float], cdf: Callable, vectorized: bool = False) -> float:
    """
    Two-sided Kolmogorov-Smirnov distance between the samples and a continuous CDF

    D = max_i max(|i/n - F(x_(i))|, |(i - 1)/n - F(x_(i))|) over the sorted sample.
    Pass vectorized=True when cdf accepts an array.
    """
    x = np.sort(_as_sample(samples))
    n = x.size
    if vectorized:
        f = np.asarray(cdf(x), dtype=float)
    else:
        f = np.fromiter((cdf(float(v)) for v in x), dtype=float, count=n)
    upper = np.arange(1, n + 1) / n
    lower = np.arange(0, n) / n
    distance = max(np.max(np.abs(upper - f)), np.max(np.abs(f - lower)))
    return float(min(distance, 1.0))


def summary_stats(values: Sequence[float]) -> SummaryStats:
    """
    Population (1/n) moments with excess kurtosis

    A constant sample is reported with sd 0 and the degenerate flag set.
    """
    data = _as_sample(values, minimum=2)
    n = int(data.size)
    mean = float(np.mean(data))
    if np.ptp(data) == 0:
        return SummaryStats(mean=float(data[0]), sd=0.0, skewness=0.0, excess_kurtosis=0.0,
                            n=n, degenerate=True)
    centred = data - mean
    return SummaryStats.from_moments(
        mean,
        float(np.mean(centred ** 2)),
        float(np.mean(centred ** 3)),
        float(np.mean(centred ** 4)),
        n=n,
    )


def histogram(values: Sequence[float], bins: int = 50,
              value_range: Optional[Tuple[float, float]] = None) -> Histogram:
    """Normalised density histogram (integrates to 1 over value_range)"""
    if bins < 1:
        raise InvalidArgumentError(f"bins must be >= 1, got {bins}")
    data = _as_sample(values)
    density, edges = np.histogram(data, bins=bins, range=value_range, density=True)
    return Histogram(edges=edges, density=density)
