"""Review-latency measures: time-to-review and patch-to-review.

Lags are real-valued fractional days. Negative lags are metadata artifacts
(review recorded before publication or before the patch) and are excluded
rather than clamped. The publish date of a GRA-linked advisory is the GRA
publication; otherwise the GHSA publication.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .records import AdvisoryRecord, AdvisorySource, classify_source
from .stats import RankTestResult, iqr_fence, mann_whitney, percentile

SECONDS_PER_DAY = 86400.0


class LagKind(str, Enum):
    time_to_review = "time_to_review"
    patch_to_review = "patch_to_review"


@dataclass(frozen=True)
class LatencySample:
    ghsa_id: str
    source: AdvisorySource
    lag_days: float
    publish_time: datetime
    kind: LagKind


def _publish_time(record: AdvisoryRecord) -> datetime | None:
    return record.gra_published_at or record.published_at


def time_to_review(record: AdvisoryRecord) -> LatencySample | None:
    """Days from publication to review; None when not computable or negative."""
    if record.github_reviewed_at is None:
        return None
    publish = _publish_time(record)
    if publish is None:
        return None
    lag = (record.github_reviewed_at - publish).total_seconds() / SECONDS_PER_DAY
    if lag < 0:
        return None
    return LatencySample(
        ghsa_id=record.ghsa_id,
        source=classify_source(record),
        lag_days=lag,
        publish_time=publish,
        kind=LagKind.time_to_review,
    )


def patch_to_review(record: AdvisoryRecord) -> LatencySample | None:
    """Days from the first patched release to review; None when not
    computable or negative. The publish time still drives window filters."""
    if record.github_reviewed_at is None or record.patched_at is None:
        return None
    publish = _publish_time(record)
    if publish is None:
        return None
    lag = (record.github_reviewed_at - record.patched_at).total_seconds() / SECONDS_PER_DAY
    if lag < 0:
        return None
    return LatencySample(
        ghsa_id=record.ghsa_id,
        source=classify_source(record),
        lag_days=lag,
        publish_time=publish,
        kind=LagKind.patch_to_review,
    )


def collect_samples(
    records: Iterable[AdvisoryRecord],
    kind: LagKind,
) -> list[LatencySample]:
    builder = time_to_review if kind is LagKind.time_to_review else patch_to_review
    return [s for s in (builder(r) for r in records) if s is not None]


def filter_window(
    samples: Iterable[LatencySample],
    start: datetime | None = None,
    end: datetime | None = None,
) -> list[LatencySample]:
    """Keep samples whose publish time falls in [start, end)."""
    out = []
    for s in samples:
        if start is not None and s.publish_time < start:
            continue
        if end is not None and s.publish_time >= end:
            continue
        out.append(s)
    return out


def percentile_table(
    samples: Sequence[LatencySample],
    groups: Sequence[str] = ("gra", "nvd"),
    percentiles: Sequence[float] = (25, 50, 75, 90, 95, 99),
) -> dict[str, dict[float, float]]:
    """Per-group lag percentiles. The pseudo-group ``all`` covers every
    sample; any empty group is a domain error."""
    table: dict[str, dict[float, float]] = {}
    for group in groups:
        if group == "all":
            values = [s.lag_days for s in samples]
        else:
            values = [s.lag_days for s in samples if s.source.value == group]
        if not values:
            raise ValueError(f"group {group!r} has no samples")
        table[group] = {q: percentile(values, q) for q in percentiles}
    return table


def monthly_median_lag(
    samples: Iterable[LatencySample],
) -> dict[tuple[str, str], float]:
    """Median lag keyed by (publish month YYYY-MM, source)."""
    buckets: dict[tuple[str, str], list[float]] = {}
    for s in samples:
        key = (s.publish_time.strftime("%Y-%m"), s.source.value)
        buckets.setdefault(key, []).append(s.lag_days)
    return {key: percentile(values, 50.0) for key, values in sorted(buckets.items())}


def compare_sources(
    samples: Iterable[LatencySample],
    group_a: AdvisorySource,
    group_b: AdvisorySource,
    window: tuple[datetime | None, datetime | None] | None = None,
    remove_outliers: bool = True,
) -> RankTestResult:
    """Mann-Whitney between two source groups, group_a first.

    Outliers beyond each group's own IQR fence are removed before testing
    when enabled; a positive rank-biserial correlation then means shorter
    lags for group_a.
    """
    pool = list(samples)
    if window is not None:
        pool = filter_window(pool, window[0], window[1])
    a = [s.lag_days for s in pool if s.source is group_a]
    b = [s.lag_days for s in pool if s.source is group_b]
    if remove_outliers:
        if len(a) >= 2:
            a = iqr_fence(a).filter(a)
        if len(b) >= 2:
            b = iqr_fence(b).filter(b)
    if not a or not b:
        raise ValueError("a comparison group is empty after filtering")
    return mann_whitney(a, b)


def share_within(
    samples: Iterable[LatencySample],
    source: AdvisorySource,
    threshold_days: float,
) -> float:
    """Fraction of the source group reviewed within the threshold."""
    lags = [s.lag_days for s in samples if s.source is source]
    if not lags:
        raise ValueError(f"no samples for source {source.value}")
    return sum(1 for lag in lags if lag <= threshold_days) / len(lags)


def write_percentile_csv(
    table: dict[str, dict[float, float]], path: str | Path
) -> None:
    percentiles = sorted({q for row in table.values() for q in row})
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["source"] + [f"P{q:g}" for q in percentiles])
        for group, row in table.items():
            writer.writerow([group] + [repr(row[q]) for q in percentiles])


def write_monthly_median_csv(
    table: dict[tuple[str, str], float], path: str | Path
) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["month", "source", "median_days"])
        for (month, source), median in table.items():
            writer.writerow([month, source, repr(median)])


def comparison_json(
    name: str,
    group_a: str,
    group_b: str,
    result: RankTestResult,
) -> dict:
    """JSON-ready record of one statistical comparison."""
    return {
        "test": name,
        "group_a": group_a,
        "group_b": group_b,
        "n1": result.n1,
        "n2": result.n2,
        "u_statistic": result.u_statistic,
        "rbc": result.rbc,
        "p_value": result.p_value,
        "prob_first_smaller": result.prob_first_smaller,
    }


def write_comparisons_json(comparisons: list[dict], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        json.dump(comparisons, fh, indent=2, sort_keys=True)
        fh.write("\n")
