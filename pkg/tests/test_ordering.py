import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from advisoryflow.ordering import (
    fifo_assessment,
    lis_length,
    rank_pairs,
    review_order_samples,
    scatter_rows,
)
from advisoryflow.records import AdvisoryRecord
from advisoryflow.synth import day, make_ghsa_id


def lis_dp(perm):
    """Quadratic dynamic-programming oracle, numpy-vectorized inner loop."""
    arr = np.asarray(perm)
    n = len(arr)
    best = np.ones(n, dtype=int)
    for i in range(1, n):
        smaller = arr[:i] < arr[i]
        if smaller.any():
            best[i] = best[:i][smaller].max() + 1
    return int(best.max())


class TestRankPairs:
    def test_identity(self):
        samples = [(i, i) for i in range(6)]
        assert rank_pairs(samples) == [1, 2, 3, 4, 5, 6]

    def test_reversed_pair(self):
        samples = [(0, 10), (1, 5)]
        assert rank_pairs(samples) == [2, 1]

    def test_recovers_generator_shuffle(self):
        rng = np.random.default_rng(31)
        sigma = rng.permutation(200) + 1
        # arrival i at time i, review time ordered by sigma
        samples = [(i, int(sigma[i])) for i in range(200)]
        assert rank_pairs(samples) == [int(s) for s in sigma]

    def test_tie_break_by_id(self):
        # arrival times tie; review times do not
        samples = [(0, 5), (0, 3)]
        assert rank_pairs(samples, ids=["a", "b"]) == [2, 1]
        assert rank_pairs(samples, ids=["b", "a"]) == [1, 2]


class TestLis:
    def test_identity(self):
        assert lis_length(list(range(1, 11))) == 10

    def test_decreasing(self):
        assert lis_length(list(range(10, 0, -1))) == 1

    def test_exhaustive_small_vs_dp(self):
        for n in range(1, 7):
            for perm in itertools.permutations(range(1, n + 1)):
                assert lis_length(perm) == lis_dp(perm)

    def test_random_vs_dp(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            n = int(rng.integers(1, 300))
            perm = rng.permutation(n) + 1
            assert lis_length(perm.tolist()) == lis_dp(perm)

    @given(st.permutations(list(range(1, 30))))
    @settings(max_examples=80, deadline=None)
    def test_inverse_permutation_same_lis(self, perm):
        inverse = [0] * len(perm)
        for i, v in enumerate(perm):
            inverse[v - 1] = i + 1
        assert lis_length(perm) == lis_length(inverse)

    @given(st.permutations(list(range(1, 20))))
    @settings(max_examples=80, deadline=None)
    def test_appending_new_max_adds_one(self, perm):
        extended = list(perm) + [len(perm) + 1]
        assert lis_length(extended) == lis_length(perm) + 1


class TestFifoAssessment:
    def test_baseline_value(self):
        stats = fifo_assessment(list(range(1, 4405)))
        assert stats.baseline_fraction == pytest.approx(2 / math.sqrt(4404))
        assert stats.baseline_fraction == pytest.approx(0.0301, abs=5e-4)
        assert stats.lis_fraction == 1.0

    def test_known_lis_fraction(self):
        # descending block of high values, then an ascending block of 984
        # lower values: the LIS is exactly the ascending block
        perm = list(range(4404, 984, -1)) + list(range(1, 985))
        stats = fifo_assessment(perm)
        assert stats.n == 4404
        assert stats.lis_length == 984
        assert stats.lis_fraction == pytest.approx(984 / 4404)
        assert stats.lis_fraction == pytest.approx(0.223, abs=5e-4)

    def test_random_permutation_monte_carlo(self):
        rng = np.random.default_rng(1234)
        fractions = [
            fifo_assessment((rng.permutation(4404) + 1).tolist()).lis_fraction
            for _ in range(200)
        ]
        assert 0.025 <= float(np.mean(fractions)) <= 0.032

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            fifo_assessment([])


class TestReviewOrderSamples:
    def test_filters_and_sources(self):
        records = [
            AdvisoryRecord(ghsa_id=make_ghsa_id(0), patched_at=day(0),
                           published_at=day(0),
                           github_reviewed_at=day(2), reviewed=True),
            # review precedes patch: dropped
            AdvisoryRecord(ghsa_id=make_ghsa_id(1), patched_at=day(3),
                           published_at=day(0),
                           github_reviewed_at=day(1), reviewed=True),
            # no patch date: dropped
            AdvisoryRecord(ghsa_id=make_ghsa_id(2), published_at=day(0),
                           github_reviewed_at=day(1), reviewed=True),
        ]
        samples = review_order_samples(records)
        assert [s.ghsa_id for s in samples] == [make_ghsa_id(0)]

    def test_cutoff_on_publish_date(self):
        early = AdvisoryRecord(ghsa_id=make_ghsa_id(0), patched_at=day(-40),
                               published_at=day(-40),
                               github_reviewed_at=day(-39), reviewed=True)
        late = AdvisoryRecord(ghsa_id=make_ghsa_id(1), patched_at=day(5),
                              published_at=day(5),
                              github_reviewed_at=day(6), reviewed=True)
        samples = review_order_samples([early, late], cutoff=day(0))
        assert [s.ghsa_id for s in samples] == [make_ghsa_id(1)]

    def test_scatter_rows_schema(self):
        records = [
            AdvisoryRecord(ghsa_id=make_ghsa_id(i), patched_at=day(i),
                           published_at=day(i),
                           github_reviewed_at=day(10 - i), reviewed=True)
            for i in range(3)
        ]
        rows = scatter_rows(review_order_samples(records))
        assert rows == [(1, 3, "other"), (2, 2, "other"), (3, 1, "other")]
