"""How FIFO is the review pipeline? Longest-increasing-subsequence evidence.

Order advisories by patch release (arrival) and by review completion; the
result is a permutation. A uniformly random permutation of size n has an
expected LIS fraction near 2/sqrt(n); a perfectly FIFO pipeline scores 1.
Values far above the random baseline indicate strong order preservation with
a minority of overtakers.
"""

import numpy as np

from advisoryflow.ordering import fifo_assessment, lis_length, rank_pairs

rng = np.random.default_rng(2)
n = 4404

# random baseline
random_perm = (rng.permutation(n) + 1).tolist()
stats = fifo_assessment(random_perm)
print(f"random permutation:  lis_fraction={stats.lis_fraction:.4f} "
      f"baseline=2/sqrt(n)={stats.baseline_fraction:.4f}")

# perfect FIFO
stats = fifo_assessment(list(range(1, n + 1)))
print(f"perfect FIFO:        lis_fraction={stats.lis_fraction:.4f}")

# mostly-FIFO with a 10% overtaking minority, built from timestamps
arrivals = np.sort(rng.uniform(0, 1000, n))
reviews = arrivals + rng.exponential(1.0, n)
overtakers = rng.random(n) < 0.10
reviews[overtakers] += rng.exponential(150.0, int(overtakers.sum()))
perm = rank_pairs(list(zip(arrivals.tolist(), reviews.tolist())))
stats = fifo_assessment(perm)
print(f"90% FIFO + slow 10%: lis_fraction={stats.lis_fraction:.4f} "
      f"({stats.lis_length} of {stats.n})")

assert lis_length(perm) == stats.lis_length
print("\nthe mixed pipeline sits far above the random baseline yet below 1,")
print("exactly the signature of a FIFO queue disturbed by a buffered minority")
