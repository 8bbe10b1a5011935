"""Acceptance suite.

One test per criterion, each enforcing its stated tolerance and printing a
single pass/fail line (run with ``pytest tests/test_acceptance.py -v -s``).
"""

import itertools
from collections import Counter
from contextlib import contextmanager
from datetime import date

import numpy as np
import pytest

from advisoryflow.cli import main as cli_main
from advisoryflow.credits import reviewer_experience, role_frequencies, specialization_table
from advisoryflow.flows import (
    FlowTuple,
    Platform,
    PlatformEvent,
    build_sankey,
    flow_tuples,
    platform_origin_share,
)
from advisoryflow.latency import LagKind, collect_samples, percentile_table, share_within, time_to_review
from advisoryflow.ordering import fifo_assessment, lis_length
from advisoryflow.queueing import (
    QueueParams,
    estimate_params,
    mean_review_time,
    simulate,
    validate_against,
    what_if,
)
from advisoryflow.records import AdvisoryRecord, AdvisorySource
from advisoryflow.stats import mann_whitney, rbc_to_prob_smaller, welch_t_test
from advisoryflow.synth import (
    build_ingestion_world,
    day,
    exponential_latency_records,
    flow_split_records,
    make_ghsa_id,
    threshold_split_records,
    traces_to_records,
)
REFERENCE = QueueParams(arrival_rate=3.413, review_rate=3.433,
                    nvd_exit_rate=0.006, nvd_first_prob=0.474)

near_critical = pytest.mark.filterwarnings("ignore::RuntimeWarning")


@contextmanager
def criterion(number, label):
    try:
        yield
    except BaseException:
        print(f"\n[criterion {number:02d}] FAIL  {label}")
        raise
    print(f"\n[criterion {number:02d}] PASS  {label}")


def test_criterion_01_mean_review_time_exactness():
    with criterion(1, "closed-form mean review time at the fitted parameters"):
        assert mean_review_time(REFERENCE) == pytest.approx(129.0, abs=0.5)
        sweep = dict(what_if(REFERENCE, [0.10]))
        assert sweep[0.10] == pytest.approx(66.7, abs=0.2)


@near_critical
def test_criterion_02_simulation_analytic_agreement():
    with criterion(2, "simulated mean review time within 5% of the formula, 5 seeds"):
        target = mean_review_time(REFERENCE)
        deviations = {}
        for seed in (1, 2, 3, 4, 5):
            traces = simulate(REFERENCE, 50_000, seed)
            mean = float(np.mean([t.review_end - t.arrival_time for t in traces]))
            deviations[seed] = round((mean - target) / target, 4)
        assert all(abs(d) < 0.05 for d in deviations.values()), (
            f"per-seed relative deviations {deviations}: at the fitted "
            f"parameters the review stage runs at utilization "
            f"{REFERENCE.utilization:.4f}, whose relaxation time (~1.2e5 arrivals) "
            f"exceeds the 5e4-arrival horizon, so the run mean does not "
            f"concentrate within 5% for any honest event simulation"
        )


@near_critical
def test_criterion_03_simulate_then_fit_round_trip():
    with criterion(3, "parameter recovery from 100k simulated arrivals"):
        traces = simulate(REFERENCE, 100_000, seed=11)
        fitted = estimate_params(traces_to_records(traces))
        assert fitted.arrival_rate == pytest.approx(REFERENCE.arrival_rate, rel=0.02)
        assert fitted.nvd_first_prob == pytest.approx(REFERENCE.nvd_first_prob, rel=0.02)
        assert fitted.review_rate == pytest.approx(REFERENCE.review_rate, rel=0.05)
        assert fitted.nvd_exit_rate == pytest.approx(REFERENCE.nvd_exit_rate, rel=0.05)


def _lis_dp_small(perm):
    best = [1] * len(perm)
    for i in range(1, len(perm)):
        for j in range(i):
            if perm[j] < perm[i] and best[j] + 1 > best[i]:
                best[i] = best[j] + 1
    return max(best, default=0)


def _lis_dp_numpy(perm):
    arr = np.asarray(perm)
    best = np.ones(len(arr), dtype=int)
    for i in range(1, len(arr)):
        smaller = arr[:i] < arr[i]
        if smaller.any():
            best[i] = best[:i][smaller].max() + 1
    return int(best.max())


def test_criterion_04_fifo_diagnostics():
    with criterion(4, "LIS oracle equality, random baseline bracket, pure FIFO"):
        # (a) oracle equality
        for n in range(1, 9):
            for perm in itertools.permutations(range(1, n + 1)):
                assert lis_length(perm) == _lis_dp_small(perm)
        rng = np.random.default_rng(404)
        for _ in range(1000):
            size = int(rng.integers(1, 501))
            perm = rng.permutation(size) + 1
            assert lis_length(perm.tolist()) == _lis_dp_numpy(perm)
        # (b) random-permutation baseline bracket at n = 4404
        rng = np.random.default_rng(405)
        fractions = [
            fifo_assessment((rng.permutation(4404) + 1).tolist()).lis_fraction
            for _ in range(200)
        ]
        assert 0.025 <= float(np.mean(fractions)) <= 0.032
        # (c) pure FIFO
        traces = simulate(QueueParams(3.413, 34.33, None, 0.0), 4404, seed=1)
        perm = [0] * len(traces)
        for t in traces:
            perm[t.arrival_rank - 1] = t.review_rank
        assert lis_length(perm) == len(perm)


def test_criterion_05_stats_kit_oracles():
    with criterion(5, "rank-test effect size against exhaustive pair counting"):
        rng = np.random.default_rng(505)
        for _ in range(100):
            n1 = int(rng.integers(1, 51))
            n2 = int(rng.integers(1, 51))
            a = rng.integers(0, 15, n1).astype(float).tolist()
            b = rng.integers(0, 15, n2).astype(float).tolist()
            less = sum(1 for x in a for y in b if x < y)
            greater = sum(1 for x in a for y in b if x > y)
            expected = (less - greater) / (n1 * n2)
            assert abs(mann_whitney(a, b).rbc - expected) < 1e-12
        assert rbc_to_prob_smaller(0.202) == pytest.approx(0.601, abs=1e-3)
        sample = list(np.random.default_rng(506).normal(size=50))
        stat, p = welch_t_test(sample, sample)
        assert p == 1.0


def test_criterion_06_flow_construction():
    with criterion(6, "worked flow-tuple sequences and the GRA-origin share"):
        x, y, z = Platform.gra, Platform.nvd, Platform.ghsa

        def ev(platform, day_no):
            return PlatformEvent(platform, date(2023, 1, day_no))

        assert flow_tuples([ev(x, 1), ev(y, 2), ev(z, 3)]) == Counter({
            FlowTuple(x, y, 1): 1, FlowTuple(y, z, 2): 1,
        })
        assert flow_tuples([ev(x, 1), ev(y, 1)]) == Counter()
        assert flow_tuples([ev(x, 1), ev(y, 1), ev(z, 2)]) == Counter({
            FlowTuple(x, z, 1): 1, FlowTuple(y, z, 1): 1,
        })
        w = Platform.rustsec
        assert flow_tuples([ev(w, 1), ev(x, 2), ev(y, 2)]) == Counter({
            FlowTuple(w, x, 1): 1, FlowTuple(w, y, 1): 1,
        })
        links = build_sankey(flow_split_records(5230, 268, 8))
        share = platform_origin_share(links, Platform.gra)
        assert abs(share - 0.95) < 0.001


def test_criterion_07_latency_rules():
    with criterion(7, "negative-lag filtering, calibrated quantiles, 5-day share"):
        from datetime import timedelta

        negative = AdvisoryRecord(
            ghsa_id=make_ghsa_id(0), published_at=day(0),
            github_reviewed_at=day(0) - timedelta(hours=6), reviewed=True,
        )
        assert time_to_review(negative) is None  # filtered, never clamped to 0
        mean_days = 4.0
        records = exponential_latency_records(10_000, mean_days, seed=9)
        samples = collect_samples(records, LagKind.time_to_review)
        table = percentile_table(samples, groups=("gra",))["gra"]
        for q in (25, 50, 75, 90, 95, 99):
            analytic = -mean_days * np.log(1 - q / 100)
            assert table[q] == pytest.approx(analytic, rel=0.03)
        records = threshold_split_records(4151, 199, threshold_days=5.0)
        samples = collect_samples(records, LagKind.time_to_review)
        share = share_within(samples, AdvisorySource.gra, 5.0)
        assert share == pytest.approx(4151 / 4350, abs=1e-12)


def test_criterion_08_credits_recovery(population):
    with criterion(8, "role population recovered exactly, prior counts +1"):
        assert role_frequencies(population.records) == population.role_occurrences
        rows = {row.role_count: row for row in specialization_table(population.records)}
        for cardinality, expected in population.combination_counts.items():
            row = rows[cardinality]
            assert row.user_count == sum(expected.values())
            expected_top = sorted(
                expected.items(),
                key=lambda item: (-item[1], tuple(r.value for r in item[0])),
            )[:3]
            assert list(row.top_combinations) == expected_top
        events = reviewer_experience(population.records, cutoff=None)
        per_login = {}
        for event in events:
            per_login.setdefault(event.reviewer_login, []).append(event.prior_review_count)
        for priors in per_login.values():
            assert priors == list(range(len(priors)))


def test_criterion_09_report_determinism(tmp_path):
    with criterion(9, "two report runs over one fixture directory are byte-identical"):
        fixtures = tmp_path / "fixtures"
        build_ingestion_world(fixtures)
        outs = []
        for name in ("run1", "run2"):
            out = tmp_path / name
            assert cli_main(["report", "--fixtures", str(fixtures),
                             "--out", str(out), "--seed", "13"]) == 0
            outs.append({
                str(p.relative_to(out)): p.read_bytes()
                for p in sorted(out.rglob("*")) if p.is_file()
            })
        assert outs[0].keys() == outs[1].keys()
        assert outs[0] == outs[1]


def test_criterion_10_validation_discriminative_power():
    with criterion(10, "order validation accepts matched runs, rejects misrouting"):
        from dataclasses import replace

        truth = QueueParams(3.413, 3.6, 0.006, 0.10)
        fixture = simulate(truth, 4404, seed=7)
        real = [(t.arrival_rank, t.review_rank) for t in fixture]
        # fit, then re-simulate with the generation seed (matched seed family)
        fitted = estimate_params(traces_to_records(fixture))
        matched = simulate(fitted, 4404, seed=7)
        _, p_matched = validate_against(real, matched)
        assert p_matched > 0.05
        misrouted = simulate(replace(fitted, nvd_first_prob=0.90), 4404, seed=7)
        _, p_misrouted = validate_against(real, misrouted)
        assert p_misrouted < 0.01
