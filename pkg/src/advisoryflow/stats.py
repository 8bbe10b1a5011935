"""Statistics primitives shared by the analysis modules.

Only the tests actually used downstream live here: linear-interpolation
percentiles, IQR outlier fences, the Mann-Whitney U test with rank-biserial
effect size, D'Agostino's K^2 normality pretest, Welch's t-test and empirical
CDFs. Everything is pure and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats as _scipy_stats


@dataclass(frozen=True)
class RankTestResult:
    """Mann-Whitney comparison of two samples.

    ``u_statistic`` is U for the first sample (number of pairs where the
    first-sample value exceeds the second, ties counted half). The
    rank-biserial correlation is 1 - 2U/(n1*n2), so rbc = +1 when the first
    sample lies entirely below the second; (rbc + 1) / 2 is the probability
    that a random first-sample member is smaller than a random second-sample
    member.
    """

    u_statistic: float
    rbc: float
    p_value: float
    n1: int
    n2: int

    @property
    def prob_first_smaller(self) -> float:
        return rbc_to_prob_smaller(self.rbc)


@dataclass(frozen=True)
class OutlierFence:
    """Tukey fences: [q1 - 1.5*iqr, q3 + 1.5*iqr]."""

    q1: float
    q3: float
    iqr: float
    lower: float
    upper: float

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def filter(self, values: Sequence[float]) -> list[float]:
        return [v for v in values if self.contains(v)]


@dataclass(frozen=True)
class EcdfCurve:
    """Step-function ECDF over the distinct sample values."""

    values: tuple[float, ...]
    fractions: tuple[float, ...]

    def evaluate(self, x: float) -> float:
        """Fraction of the sample <= x."""
        idx = np.searchsorted(self.values, x, side="right")
        return 0.0 if idx == 0 else self.fractions[idx - 1]


def percentile(values: Sequence[float], q: float) -> float:
    """Linear-interpolation percentile of the sample, q in [0, 100]."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("percentile of empty sample")
    if not 0.0 <= q <= 100.0:
        raise ValueError(f"percentile rank {q} outside [0, 100]")
    return float(np.percentile(arr, q, method="linear"))


def iqr_fence(values: Sequence[float]) -> OutlierFence:
    arr = np.asarray(values, dtype=float)
    if arr.size < 2:
        raise ValueError("IQR fence needs at least 2 values")
    q1 = percentile(arr, 25.0)
    q3 = percentile(arr, 75.0)
    iqr = q3 - q1
    return OutlierFence(q1=q1, q3=q3, iqr=iqr, lower=q1 - 1.5 * iqr, upper=q3 + 1.5 * iqr)


def mann_whitney(sample1: Sequence[float], sample2: Sequence[float]) -> RankTestResult:
    """Two-sided Mann-Whitney U test with rank-biserial effect size.

    Mid-ranks handle ties; the p-value uses the normal approximation with tie
    and continuity corrections for all sample sizes. When the tie-corrected
    variance degenerates (all values equal) the p-value is 1.
    """
    x = np.asarray(sample1, dtype=float)
    y = np.asarray(sample2, dtype=float)
    if x.size == 0 or y.size == 0:
        raise ValueError("mann_whitney needs two nonempty samples")
    n1, n2 = x.size, y.size
    combined = np.concatenate([x, y])
    ranks = _scipy_stats.rankdata(combined)
    r1 = float(ranks[:n1].sum())
    u = r1 - n1 * (n1 + 1) / 2.0  # pairs with x > y, ties counted half
    rbc = 1.0 - 2.0 * u / (n1 * n2)

    n = n1 + n2
    _, tie_counts = np.unique(combined, return_counts=True)
    tie_term = float((tie_counts.astype(float) ** 3 - tie_counts).sum())
    var_u = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if var_u <= 0.0:
        p = 1.0
    else:
        z = (abs(u - n1 * n2 / 2.0) - 0.5) / math.sqrt(var_u)
        z = max(z, 0.0)
        p = min(1.0, math.erfc(z / math.sqrt(2.0)))
    return RankTestResult(u_statistic=u, rbc=rbc, p_value=p, n1=int(n1), n2=int(n2))


def rbc_to_prob_smaller(rbc: float) -> float:
    """Probability a random first-sample member is below a random
    second-sample member, given the rank-biserial correlation."""
    return (rbc + 1.0) / 2.0


def dagostino_k2(values: Sequence[float]) -> tuple[float, float]:
    """D'Agostino's K^2 omnibus normality test (skewness + kurtosis).

    Returns (statistic, p_value); p comes from chi-squared with 2 degrees of
    freedom. Requires at least 20 observations with nonzero variance.
    """
    arr = np.asarray(values, dtype=float)
    if arr.size < 20:
        raise ValueError("dagostino_k2 needs at least 20 observations")
    if float(arr.var()) == 0.0:
        raise ValueError("dagostino_k2 undefined for constant sample")
    stat, p = _scipy_stats.normaltest(arr)
    return float(stat), float(p)


def welch_t_test(sample1: Sequence[float], sample2: Sequence[float]) -> tuple[float, float]:
    """Two-sided Welch t-test (unequal variances). Returns (statistic, p)."""
    a = np.asarray(sample1, dtype=float)
    b = np.asarray(sample2, dtype=float)
    if a.size < 2 or b.size < 2:
        raise ValueError("welch_t_test needs at least 2 observations per sample")
    if float(a.var(ddof=1)) + float(b.var(ddof=1)) == 0.0:
        raise ValueError("welch_t_test undefined for two constant samples")
    result = _scipy_stats.ttest_ind(a, b, equal_var=False)
    return float(result.statistic), float(result.pvalue)


def ecdf(values: Sequence[float]) -> EcdfCurve:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("ecdf of empty sample")
    support, counts = np.unique(arr, return_counts=True)
    fractions = np.cumsum(counts) / arr.size
    return EcdfCurve(values=tuple(float(v) for v in support),
                     fractions=tuple(float(f) for f in fractions))
