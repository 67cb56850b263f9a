"""Mergeable Monte Carlo moment summaries."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import reduce

import numpy as np


@dataclass(frozen=True)
class SimulationSummary:
    """Count, extremes and central moment sums of a sample.

    ``m2``, ``m3``, ``m4`` are sums of 2nd/3rd/4th powers of deviations from
    the mean, which is what makes pairwise merging exact (Pebay 2008).
    """

    count: int
    mean: float
    m2: float
    m3: float
    m4: float
    min: float
    max: float

    @classmethod
    def from_samples(cls, samples) -> "SimulationSummary":
        x = np.asarray(samples, dtype=np.float64)
        if x.size == 0:
            raise ValueError("cannot summarize an empty sample")
        mean = float(np.mean(x))
        d = x - mean
        d2 = d * d
        return cls(
            count=int(x.size),
            mean=mean,
            m2=float(np.sum(d2)),
            m3=float(np.sum(d2 * d)),
            m4=float(np.sum(d2 * d2)),
            min=float(np.min(x)),
            max=float(np.max(x)),
        )

    def merge(self, other: "SimulationSummary") -> "SimulationSummary":
        na, nb = self.count, other.count
        n = na + nb
        delta = other.mean - self.mean
        d_n = delta / n
        prod = na * nb
        m2 = self.m2 + other.m2 + delta * d_n * prod
        m3 = (
            self.m3
            + other.m3
            + delta * d_n * d_n * prod * (na - nb)
            + 3.0 * d_n * (na * other.m2 - nb * self.m2)
        )
        m4 = (
            self.m4
            + other.m4
            + delta * d_n * d_n * d_n * prod * (na * na - prod + nb * nb)
            + 6.0 * d_n * d_n * (na * na * other.m2 + nb * nb * self.m2)
            + 4.0 * d_n * (na * other.m3 - nb * self.m3)
        )
        mean = self.mean + d_n * nb
        return SimulationSummary(
            count=n,
            mean=min(max(mean, min(self.min, other.min)), max(self.max, other.max)),
            m2=max(m2, 0.0),
            m3=m3,
            m4=max(m4, 0.0),
            min=min(self.min, other.min),
            max=max(self.max, other.max),
        )

    @staticmethod
    def merge_all(parts) -> "SimulationSummary":
        """Left fold in the given order; callers pass a canonical order."""
        return reduce(SimulationSummary.merge, parts)

    @property
    def variance(self) -> float:
        """Unbiased sample variance."""
        if self.count < 2:
            return 0.0
        return self.m2 / (self.count - 1)

    @property
    def std_error(self) -> float:
        return math.sqrt(self.variance / self.count)

    @property
    def variance_std_error(self) -> float:
        """Large-sample standard error of ``variance``: sqrt((mu4 - s^4 (N-3)/(N-1)) / N)."""
        n = self.count
        if n < 4:
            return math.inf
        s2 = self.variance
        mu4 = self.m4 / n
        return math.sqrt(max(mu4 - s2 * s2 * (n - 3) / (n - 1), 0.0) / n)

    def to_dict(self) -> dict:
        out = asdict(self)
        out.update(
            variance=self.variance,
            std_error=self.std_error,
            variance_std_error=self.variance_std_error,
        )
        return out
