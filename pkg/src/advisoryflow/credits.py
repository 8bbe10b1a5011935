"""Credited-user analysis: role frequencies, specialization, popularity and
reviewer experience.

Role statistics are computed at the credit-occurrence level: a user credited
on k advisories contributes k occurrences. Reviewer experience treats every
credited user of a reviewed advisory as a participant of that review event;
an event's experience is the number of strictly earlier review events of the
same user, counted over the full history even when output is restricted to
the stabilized post-automation window.
"""

from __future__ import annotations

import csv
from collections import Counter, defaultdict
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .records import (
    POST_AUTOMATION_CUTOFF,
    AdvisoryRecord,
    RepoMetadata,
    Role,
    UserProfile,
)
from .stats import RankTestResult, mann_whitney


@dataclass(frozen=True)
class RoleCombinationRow:
    role_count: int
    user_count: int
    top_combinations: tuple[tuple[tuple[Role, ...], int], ...]


@dataclass(frozen=True)
class RolePopularityRow:
    role: Role
    occurrences: int
    stars_mean: float
    stars_median: float
    stars_std: float
    followers_mean: float
    followers_median: float
    followers_std: float
    missing_profiles: int


@dataclass(frozen=True)
class ExperienceEvent:
    reviewer_login: str
    review_time: datetime
    prior_review_count: int
    is_gra: bool


def role_frequencies(records: Iterable[AdvisoryRecord]) -> dict[Role, int]:
    """Occurrence count per role across all (advisory, credit) pairs."""
    counts = {role: 0 for role in Role}
    for record in records:
        for credit in record.credits:
            counts[credit.role] += 1
    return counts


def specialization_table(records: Iterable[AdvisoryRecord]) -> list[RoleCombinationRow]:
    """Users grouped by how many distinct roles they have held.

    Per group the top three role combinations are reported, ordered by count
    descending with lexicographic role-set tie-break.
    """
    user_roles: dict[str, set[Role]] = defaultdict(set)
    for record in records:
        for credit in record.credits:
            user_roles[credit.user_login].add(credit.role)
    by_cardinality: dict[int, Counter] = defaultdict(Counter)
    for roles in user_roles.values():
        combo = tuple(sorted(roles, key=lambda r: r.value))
        by_cardinality[len(combo)][combo] += 1
    rows = []
    for cardinality in sorted(by_cardinality):
        combos = by_cardinality[cardinality]
        ranked = sorted(
            combos.items(),
            key=lambda item: (-item[1], tuple(r.value for r in item[0])),
        )
        rows.append(RoleCombinationRow(
            role_count=cardinality,
            user_count=sum(combos.values()),
            top_combinations=tuple(ranked[:3]),
        ))
    return rows


def popularity_by_role(
    records: Iterable[AdvisoryRecord],
    profiles: Iterable[UserProfile],
) -> list[RolePopularityRow]:
    """Mean/median/std of stars and followers per role, occurrence-level.

    Occurrences whose user has no profile (deleted accounts, fetch failures)
    are excluded from the statistics but still counted in ``occurrences`` and
    reported via ``missing_profiles``.
    """
    by_login = {p.login: p for p in profiles}
    stars: dict[Role, list[float]] = defaultdict(list)
    followers: dict[Role, list[float]] = defaultdict(list)
    occurrences: Counter = Counter()
    missing: Counter = Counter()
    for record in records:
        for credit in record.credits:
            occurrences[credit.role] += 1
            profile = by_login.get(credit.user_login)
            if profile is None:
                missing[credit.role] += 1
                continue
            stars[credit.role].append(float(profile.total_stars))
            followers[credit.role].append(float(profile.followers))

    def describe(values: list[float]) -> tuple[float, float, float]:
        if not values:
            return (float("nan"),) * 3
        arr = np.asarray(values)
        return float(arr.mean()), float(np.median(arr)), float(arr.std())

    rows = []
    for role in Role:
        if occurrences[role] == 0:
            continue
        s_mean, s_median, s_std = describe(stars[role])
        f_mean, f_median, f_std = describe(followers[role])
        rows.append(RolePopularityRow(
            role=role,
            occurrences=occurrences[role],
            stars_mean=s_mean, stars_median=s_median, stars_std=s_std,
            followers_mean=f_mean, followers_median=f_median, followers_std=f_std,
            missing_profiles=missing[role],
        ))
    rows.sort(key=lambda r: -r.occurrences)
    return rows


def reviewer_experience(
    records: Iterable[AdvisoryRecord],
    cutoff: datetime | None = POST_AUTOMATION_CUTOFF,
) -> list[ExperienceEvent]:
    """One event per (credited user, reviewed advisory).

    Prior counts cover the user's whole history; only events at or after the
    cutoff are returned (pass None to keep everything). Identical review
    timestamps order by ghsa_id.
    """
    raw: list[tuple[datetime, str, str, bool]] = []
    for record in records:
        if record.github_reviewed_at is None or not record.credits:
            continue
        is_gra = bool(record.repository_advisory_url)
        for login in sorted({c.user_login for c in record.credits}):
            raw.append((record.github_reviewed_at, record.ghsa_id, login, is_gra))
    by_login: dict[str, list[tuple[datetime, str, bool]]] = defaultdict(list)
    for review_time, ghsa_id, login, is_gra in raw:
        by_login[login].append((review_time, ghsa_id, is_gra))
    events = []
    for login in sorted(by_login):
        history = sorted(by_login[login], key=lambda item: (item[0], item[1]))
        for prior, (review_time, _, is_gra) in enumerate(history):
            if cutoff is not None and review_time < cutoff:
                continue
            events.append(ExperienceEvent(
                reviewer_login=login,
                review_time=review_time,
                prior_review_count=prior,
                is_gra=is_gra,
            ))
    events.sort(key=lambda e: (e.review_time, e.reviewer_login))
    return events


_METRICS: dict[str, Callable[[RepoMetadata], float | None]] = {
    "stars": lambda m: float(m.stars),
    "open_issues": lambda m: float(m.open_issues),
    "security_policy_score": lambda m: m.security_policy_score,
    "maintained_score": lambda m: m.maintained_score,
}


def compare_repo_groups(
    metadata: Sequence[RepoMetadata],
    metric: str,
) -> RankTestResult:
    """Mann-Whitney on a repository metric, GRA-linked group first.

    Repositories without a value for the metric (absent scorecard scores)
    are skipped.
    """
    if metric not in _METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {sorted(_METRICS)}")
    extract = _METRICS[metric]
    gra = [v for m in metadata if m.gra_linked and (v := extract(m)) is not None]
    non = [v for m in metadata if not m.gra_linked and (v := extract(m)) is not None]
    if len(gra) < 2 or len(non) < 2:
        raise ValueError("each repository group needs at least 2 values")
    return mann_whitney(gra, non)


def policy_share(metadata: Sequence[RepoMetadata]) -> tuple[float, float]:
    """Fraction of repositories with an explicit security policy (score > 0)
    among those carrying the score, as (gra_linked, non_gra_linked)."""
    def share(group: list[RepoMetadata]) -> float:
        scored = [m for m in group if m.security_policy_score is not None]
        if not scored:
            raise ValueError("no scored repositories in a group")
        return sum(1 for m in scored if m.security_policy_score > 0) / len(scored)

    return (
        share([m for m in metadata if m.gra_linked]),
        share([m for m in metadata if not m.gra_linked]),
    )


def write_role_frequencies_csv(counts: dict[Role, int], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["role", "occurrences"])
        for role, count in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0].value)):
            writer.writerow([role.value, count])


def write_specialization_csv(rows: Sequence[RoleCombinationRow], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["role_count", "user_count", "top_combinations"])
        for row in rows:
            combos = "; ".join(
                "+".join(role.value for role in combo) + f":{count}"
                for combo, count in row.top_combinations
            )
            writer.writerow([row.role_count, row.user_count, combos])


def write_popularity_csv(rows: Sequence[RolePopularityRow], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([
            "role", "occurrences",
            "stars_mean", "stars_median", "stars_std",
            "followers_mean", "followers_median", "followers_std",
            "missing_profiles",
        ])
        for r in rows:
            writer.writerow([
                r.role.value, r.occurrences,
                repr(r.stars_mean), repr(r.stars_median), repr(r.stars_std),
                repr(r.followers_mean), repr(r.followers_median), repr(r.followers_std),
                r.missing_profiles,
            ])


def write_experience_ecdf_csv(values: Sequence[float], path: str | Path) -> None:
    """Two-column ECDF export (value, cumulative_fraction)."""
    from .stats import ecdf

    curve = ecdf(values)
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["value", "cumulative_fraction"])
        for value, fraction in zip(curve.values, curve.fractions):
            writer.writerow([repr(value), repr(fraction)])
