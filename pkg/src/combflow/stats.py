"""Test kernels used by verification: KS and chi-square statistics.

Only statistics, no p-values: verification compares each statistic against a
fixed threshold recorded alongside it, which keeps the pass criteria explicit
and the dependency surface flat.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "TestReport",
    "ks_one_sample",
    "ks_two_sample",
    "chi_square_uniform",
]


@dataclass(frozen=True)
class TestReport:
    """One named statistic with the threshold it was held against."""

    __test__ = False  # keep pytest from collecting this as a test class

    name: str
    statistic: float
    n: int
    m: int
    threshold: float
    passed: bool

    def __post_init__(self) -> None:
        if self.passed != (self.statistic < self.threshold):
            raise ValueError("pass flag must equal statistic < threshold")

    @classmethod
    def from_statistic(
        cls, name: str, statistic: float, threshold: float, n: int, m: int = 0
    ) -> "TestReport":
        return cls(
            name=name,
            statistic=float(statistic),
            n=int(n),
            m=int(m),
            threshold=float(threshold),
            passed=bool(statistic < threshold),
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "statistic": self.statistic,
            "n": self.n,
            "m": self.m,
            "threshold": self.threshold,
            "passed": self.passed,
        }


def ks_one_sample(samples: Sequence[float], cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """sup |ECDF - cdf| over the sample, both one-sided gaps included.

    The empirical CDF jumps from (i-1)/n to i/n at the i-th order statistic,
    so the sup is attained either just below a sample point (F - (i-1)/n) or
    at it (i/n - F); taking only one side underestimates the statistic.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = len(x)
    if n == 0:
        raise ValueError("need at least one sample")
    f = np.asarray(cdf(x), dtype=float)
    grid = np.arange(1, n + 1) / n
    d_plus = np.max(grid - f)
    d_minus = np.max(f - (grid - 1.0 / n))
    return float(max(d_plus, d_minus))


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> float:
    """sup |ECDF_a - ECDF_b| evaluated on the pooled sample points."""
    xa = np.sort(np.asarray(a, dtype=float))
    xb = np.sort(np.asarray(b, dtype=float))
    if len(xa) == 0 or len(xb) == 0:
        raise ValueError("both samples must be nonempty")
    pooled = np.concatenate([xa, xb])
    ca = np.searchsorted(xa, pooled, side="right") / len(xa)
    cb = np.searchsorted(xb, pooled, side="right") / len(xb)
    return float(np.max(np.abs(ca - cb)))


def chi_square_uniform(counts: Sequence[int]) -> float:
    """Pearson chi-square of observed counts against equal expected counts."""
    obs = np.asarray(counts, dtype=float)
    if len(obs) < 2:
        raise ValueError("need at least two categories")
    total = obs.sum()
    if total <= 0:
        raise ValueError("total count must be positive")
    expected = total / len(obs)
    return float(np.sum((obs - expected) ** 2) / expected)
