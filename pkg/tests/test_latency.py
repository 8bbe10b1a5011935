import math
import random
from datetime import timedelta

import numpy as np
import pytest

from advisoryflow.latency import (
    LagKind,
    LatencySample,
    collect_samples,
    compare_sources,
    filter_window,
    monthly_median_lag,
    patch_to_review,
    percentile_table,
    share_within,
    time_to_review,
)
from advisoryflow.records import AdvisoryRecord, AdvisorySource
from advisoryflow.synth import (
    day,
    exponential_latency_records,
    make_ghsa_id,
    random_records,
    threshold_split_records,
)


def sample(source, lag, month=0.0, kind=LagKind.time_to_review):
    return LatencySample(
        ghsa_id=make_ghsa_id(int(lag * 1000) % 36**4),
        source=source,
        lag_days=lag,
        publish_time=day(month * 30.44),
        kind=kind,
    )


class TestTimeToReview:
    def test_zero_lag(self):
        record = AdvisoryRecord(ghsa_id=make_ghsa_id(0), published_at=day(0),
                                github_reviewed_at=day(0), reviewed=True)
        assert time_to_review(record).lag_days == 0.0

    def test_gra_publish_governs(self):
        record = AdvisoryRecord(
            ghsa_id=make_ghsa_id(0),
            repository_advisory_url="https://github.com/a/b/security/advisories/x",
            gra_published_at=day(0),
            published_at=day(5),
            github_reviewed_at=day(1),
            reviewed=True,
        )
        result = time_to_review(record)
        assert result.lag_days == pytest.approx(1.0)
        assert result.source is AdvisorySource.gra

    def test_negative_lag_filtered(self):
        record = AdvisoryRecord(ghsa_id=make_ghsa_id(0), published_at=day(0),
                                github_reviewed_at=day(0) - timedelta(hours=6),
                                reviewed=True)
        assert time_to_review(record) is None

    def test_unreviewed_skipped(self):
        assert time_to_review(AdvisoryRecord(ghsa_id=make_ghsa_id(0),
                                             published_at=day(0))) is None


class TestPatchToReview:
    def test_zero_lag(self):
        record = AdvisoryRecord(ghsa_id=make_ghsa_id(0), published_at=day(0),
                                patched_at=day(1), github_reviewed_at=day(1),
                                reviewed=True)
        assert patch_to_review(record).lag_days == 0.0

    def test_fractional_day_lag(self):
        record = AdvisoryRecord(ghsa_id=make_ghsa_id(0), published_at=day(0),
                                patched_at=day(0),
                                github_reviewed_at=day(0) + timedelta(days=2.04),
                                reviewed=True)
        assert patch_to_review(record).lag_days == pytest.approx(2.04, abs=1e-6)

    def test_review_before_patch_filtered(self):
        record = AdvisoryRecord(ghsa_id=make_ghsa_id(0), published_at=day(0),
                                patched_at=day(2), github_reviewed_at=day(1),
                                reviewed=True)
        assert patch_to_review(record) is None

    def test_never_negative_over_random_data(self):
        records = random_records(400, seed=6)
        for kind in LagKind:
            for s in collect_samples(records, kind):
                assert s.lag_days >= 0.0


class TestPercentileTable:
    def test_single_sample_groups(self):
        samples = [sample(AdvisorySource.gra, 2.0), sample(AdvisorySource.nvd, 7.0)]
        table = percentile_table(samples)
        assert all(v == 2.0 for v in table["gra"].values())
        assert all(v == 7.0 for v in table["nvd"].values())

    def test_empty_group_rejected(self):
        with pytest.raises(ValueError):
            percentile_table([sample(AdvisorySource.gra, 1.0)], groups=("gra", "nvd"))

    def test_monotone_across_percentiles(self):
        rng = np.random.default_rng(3)
        samples = [sample(AdvisorySource.gra, float(x)) for x in rng.exponential(3, 500)]
        row = percentile_table(samples, groups=("gra",))["gra"]
        values = [row[q] for q in sorted(row)]
        assert values == sorted(values)

    def test_exponential_generator_quantiles(self):
        mean_days = 4.0
        records = exponential_latency_records(10_000, mean_days, seed=9)
        samples = collect_samples(records, LagKind.time_to_review)
        table = percentile_table(samples, groups=("gra",))["gra"]
        for q in (25, 50, 75, 90, 95, 99):
            analytic = -mean_days * math.log(1 - q / 100)
            assert table[q] == pytest.approx(analytic, rel=0.03)


class TestMonthlyMedian:
    def test_single_sample(self):
        table = monthly_median_lag([sample(AdvisorySource.gra, 3.5)])
        assert list(table.values()) == [3.5]

    def test_small_group_median(self):
        samples = [sample(AdvisorySource.gra, lag) for lag in (1.0, 2.0, 9.0)]
        table = monthly_median_lag(samples)
        assert list(table.values()) == [2.0]

    def test_step_change_regime(self):
        rng = random.Random(4)
        samples = []
        for month in range(-6, 0):  # slow regime
            for _ in range(40):
                samples.append(sample(AdvisorySource.nvd, 30 + rng.random() * 20, month))
        for month in range(0, 6):  # fast regime after the step
            for _ in range(40):
                samples.append(sample(AdvisorySource.nvd, rng.random() * 2, month))
        table = monthly_median_lag(samples)
        step = day(0).strftime("%Y-%m")
        pre = [v for (m, _), v in table.items() if m < step]
        post = [v for (m, _), v in table.items() if m >= step]
        assert max(post) < min(pre)


class TestCompareSources:
    def test_identical_groups(self):
        samples = [sample(AdvisorySource.gra, lag) for lag in (1, 2, 3, 4)]
        samples += [sample(AdvisorySource.nvd, lag) for lag in (1, 2, 3, 4)]
        result = compare_sources(samples, AdvisorySource.gra, AdvisorySource.nvd)
        assert result.rbc == 0.0

    def test_sign_convention_smaller_is_positive(self):
        samples = [sample(AdvisorySource.gra, lag) for lag in np.linspace(0.1, 1, 30)]
        samples += [sample(AdvisorySource.nvd, lag) for lag in np.linspace(5, 9, 30)]
        result = compare_sources(samples, AdvisorySource.gra, AdvisorySource.nvd)
        assert result.rbc == 1.0

    def test_antisymmetry(self):
        rng = np.random.default_rng(12)
        samples = [sample(AdvisorySource.gra, float(x)) for x in rng.exponential(1, 80)]
        samples += [sample(AdvisorySource.nvd, float(x)) for x in rng.exponential(3, 70)]
        ab = compare_sources(samples, AdvisorySource.gra, AdvisorySource.nvd)
        ba = compare_sources(samples, AdvisorySource.nvd, AdvisorySource.gra)
        assert ab.rbc == -ba.rbc

    def test_outlier_removal_order_insensitive(self):
        rng = np.random.default_rng(13)
        lags = list(rng.exponential(2, 200)) + [500.0, 900.0]
        samples = [sample(AdvisorySource.gra, float(x)) for x in lags]
        samples += [sample(AdvisorySource.nvd, float(x)) for x in rng.exponential(2, 150)]
        direct = compare_sources(samples, AdvisorySource.gra, AdvisorySource.nvd)
        rng.shuffle(samples)
        shuffled = compare_sources(samples, AdvisorySource.gra, AdvisorySource.nvd)
        assert direct == shuffled
        assert direct.n1 <= 200  # the two extreme lags were fenced out

    def test_calibrated_rbc_effect_size(self):
        # exact pair counts: 6010 of the 10000 (a, b) pairs have a < b,
        # giving rbc = (6010 - 3990) / 10000 = 0.202
        a = [float(i) for i in range(100)]
        b = [99.5] * 60 + [9.5] * 1 + [-0.5] * 39
        samples = [sample(AdvisorySource.gra, lag) for lag in a]
        samples += [sample(AdvisorySource.nvd, lag) for lag in b]
        result = compare_sources(samples, AdvisorySource.gra, AdvisorySource.nvd,
                                 remove_outliers=False)
        assert result.rbc == pytest.approx(0.202, abs=1e-12)
        assert result.prob_first_smaller == pytest.approx(0.601, abs=1e-3)

    def test_window_filter(self):
        early = [sample(AdvisorySource.gra, 1.0, month=-3) for _ in range(5)]
        late_a = [sample(AdvisorySource.gra, 1.0, month=1) for _ in range(5)]
        late_b = [sample(AdvisorySource.nvd, 2.0, month=1) for _ in range(5)]
        result = compare_sources(early + late_a + late_b, AdvisorySource.gra,
                                 AdvisorySource.nvd, window=(day(0), None),
                                 remove_outliers=False)
        assert result.n1 == 5

    def test_emptied_group_rejected(self):
        samples = [sample(AdvisorySource.gra, 1.0, month=-3)]
        samples += [sample(AdvisorySource.nvd, 1.0, month=1) for _ in range(3)]
        with pytest.raises(ValueError):
            compare_sources(samples, AdvisorySource.gra, AdvisorySource.nvd,
                            window=(day(0), None))


class TestShareWithin:
    def test_infinite_threshold(self):
        samples = [sample(AdvisorySource.gra, lag) for lag in (1, 10, 100)]
        assert share_within(samples, AdvisorySource.gra, math.inf) == 1.0

    def test_below_minimum(self):
        samples = [sample(AdvisorySource.gra, lag) for lag in (1, 10, 100)]
        assert share_within(samples, AdvisorySource.gra, 0.5) == 0.0

    def test_five_day_share_split(self):
        records = threshold_split_records(4151, 199, threshold_days=5.0)
        samples = collect_samples(records, LagKind.time_to_review)
        share = share_within(samples, AdvisorySource.gra, 5.0)
        assert share == pytest.approx(4151 / 4350, abs=1e-12)
        assert share == pytest.approx(0.954, abs=5e-4)

    def test_empty_group_rejected(self):
        with pytest.raises(ValueError):
            share_within([], AdvisorySource.gra, 5.0)


class TestFilterWindow:
    def test_half_open_interval(self):
        inside = sample(AdvisorySource.gra, 1.0, month=0)
        before = sample(AdvisorySource.gra, 1.0, month=-1)
        kept = filter_window([inside, before], start=day(0), end=day(40))
        assert kept == [inside]
