"""Tour of the statistics kit on synthetic review-lag data.

Review lags are heavily skewed, so the toolkit leans on percentiles, IQR
fences and the Mann-Whitney test with rank-biserial effect size rather than
moments and t-tests (the t-test appears only where the compared quantities
are rank differences).
"""

import numpy as np

from advisoryflow import (
    dagostino_k2,
    ecdf,
    iqr_fence,
    mann_whitney,
    percentile,
    welch_t_test,
)

rng = np.random.default_rng(0)

# fast lane: sub-day to few-day lags; slow lane: weeks to months
fast = rng.exponential(1.2, 4000)
slow = rng.exponential(35.0, 6000)

print("percentiles of the fast group (days):")
for q in (25, 50, 75, 90, 95, 99):
    print(f"  P{q:<3} = {percentile(fast, q):8.2f}")

stat, p = dagostino_k2(slow)
print(f"\nnormality pretest on the slow group: K2={stat:.1f} p={p:.2e}"
      "  (skewed, as expected -> rank test)")

result = mann_whitney(fast, slow)
print(f"rank test fast vs slow: rbc={result.rbc:.3f} p={result.p_value:.2e}")
print(f"  P(fast < slow) = {result.prob_first_smaller:.3f}")

fence = iqr_fence(slow)
kept = fence.filter(slow)
print(f"\nIQR fence on the slow group: upper={fence.upper:.1f} days, "
      f"{len(slow) - len(kept)} outliers removed")

curve = ecdf(fast)
print("\nECDF of the fast group at 1, 2, 5 days:",
      [round(curve.evaluate(x), 3) for x in (1, 2, 5)])

same = rng.normal(0, 1, 500)
print(f"\nWelch t on a sample against itself: p={welch_t_test(same, same)[1]}")
