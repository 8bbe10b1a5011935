"""Synthetic datasets and recorded-fixture builders.

Everything here is deterministic given its arguments (and seed, where one
exists): identifier sequences, fuzzable random records, calibrated
populations for the credit/flow/latency analyses, bridges from simulated
queue traces to advisory records, and writers that lay down a complete
provider fixture directory for offline ingestion runs.

Simulated horizons can extend decades past the wall clock; such records are
meant for in-memory analysis, not for validated storage.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .ingestion.enrich import history_request, project_request, registry_version_request
from .ingestion.github import (
    advisories_page_request,
    gra_request,
    user_repos_request,
    user_request,
)
from .ingestion.providers import ApiRequest, ApiResponse, write_fixture
from .queueing import SimTrace
from .records import (
    AdvisoryRecord,
    AffectedPackage,
    Credit,
    Ecosystem,
    EcosystemDb,
    Role,
    Severity,
)

DEFAULT_EPOCH = datetime(2022, 7, 1, tzinfo=timezone.utc)

_ID_ALPHABET = string.digits + string.ascii_lowercase


def make_ghsa_id(index: int) -> str:
    """Deterministic unique identifier in GHSA-xxxx-xxxx-xxxx format."""
    digits = []
    value = index
    for _ in range(12):
        digits.append(_ID_ALPHABET[value % 36])
        value //= 36
    chunk = "".join(reversed(digits))
    return f"GHSA-{chunk[0:4]}-{chunk[4:8]}-{chunk[8:12]}"


def day(n: float, epoch: datetime = DEFAULT_EPOCH) -> datetime:
    """Epoch plus n days, truncated to seconds."""
    return (epoch + timedelta(days=n)).replace(microsecond=0)


# --- fuzzable records --------------------------------------------------------

def random_records(n: int, seed: int = 0) -> list[AdvisoryRecord]:
    """Valid, varied records for round-trip and property tests. Timestamps
    stay within 2001-2024 at seconds precision."""
    rng = np.random.default_rng(seed)
    base = datetime(2001, 1, 1, tzinfo=timezone.utc)

    def when() -> datetime:
        return (base + timedelta(seconds=int(rng.integers(0, 700_000_000)))).replace(microsecond=0)

    records = []
    ecosystems = list(Ecosystem)
    severities = list(Severity)
    roles = list(Role)
    for i in range(n):
        reviewed = bool(rng.random() < 0.7)
        eco = ecosystems[int(rng.integers(0, len(ecosystems)))]
        credits = tuple(
            Credit(user_login=f"user{int(rng.integers(0, 40))}",
                   role=roles[int(rng.integers(0, len(roles)))])
            for _ in range(int(rng.integers(0, 4)))
        )
        vulnerabilities = tuple(
            AffectedPackage(
                package_name=f"pkg-{int(rng.integers(0, 50))}",
                ecosystem=eco,
                first_patched_version=f"1.{int(rng.integers(0, 9))}.0"
                if rng.random() < 0.8 else None,
            )
            for _ in range(int(rng.integers(0, 3)))
        )
        eco_published = {}
        for db in EcosystemDb:
            if rng.random() < 0.15:
                eco_published[db] = when()
        has_gra = rng.random() < 0.4
        records.append(AdvisoryRecord(
            ghsa_id=make_ghsa_id(i),
            cve_id=f"CVE-20{int(rng.integers(10, 24)):02d}-{int(rng.integers(1000, 99999))}"
            if rng.random() < 0.8 else None,
            severity=severities[int(rng.integers(0, len(severities)))],
            ecosystem=eco,
            source_code_location=f"owner{int(rng.integers(0, 20))}/repo{int(rng.integers(0, 20))}"
            if rng.random() < 0.8 else None,
            repository_advisory_url=(
                f"https://github.com/owner{i % 20}/repo{i % 20}/security/advisories/{make_ghsa_id(i)}"
                if has_gra else None
            ),
            published_at=when() if rng.random() < 0.95 else None,
            nvd_published_at=when() if rng.random() < 0.6 else None,
            github_reviewed_at=when() if reviewed else None,
            gra_published_at=when() if has_gra and rng.random() < 0.8 else None,
            ecosystem_published_at=eco_published,
            patched_at=when() if rng.random() < 0.5 else None,
            references=tuple(f"https://example.org/ref/{i}/{j}"
                             for j in range(int(rng.integers(0, 3)))),
            vulnerabilities=vulnerabilities,
            credits=credits,
            reviewed=reviewed,
        ))
    return records


# --- queue-simulation bridge -------------------------------------------------

def traces_to_records(
    traces: Iterable[SimTrace],
    epoch: datetime = DEFAULT_EPOCH,
) -> list[AdvisoryRecord]:
    """Advisory records whose patch/NVD/review timestamps replay simulated
    traces: arrival becomes the patch release, the buffering exit becomes the
    NVD publication, and the service completion becomes the review."""
    records = []
    for i, trace in enumerate(traces):
        patched = day(trace.arrival_time, epoch)
        reviewed = day(trace.review_end, epoch)
        nvd = None
        if trace.stage2_exit_time is not None:
            nvd = day(trace.stage2_exit_time, epoch)
        records.append(AdvisoryRecord(
            ghsa_id=make_ghsa_id(i),
            published_at=patched,
            nvd_published_at=nvd,
            github_reviewed_at=reviewed,
            patched_at=patched,
            reviewed=True,
        ))
    return records


# --- credit populations ------------------------------------------------------

@dataclass
class RolePopulationTruth:
    records: list[AdvisoryRecord]
    role_occurrences: dict[Role, int]
    combination_counts: dict[int, dict[tuple[Role, ...], int]]
    distinct_users: int


#: Roles common enough to absorb filler combinations without exhausting the
#: occurrence budget of the rare roles.
_FILLER_ROLES = (
    Role.analyst,
    Role.reporter,
    Role.finder,
    Role.remediation_developer,
    Role.remediation_reviewer,
    Role.coordinator,
)


def _combinations(pool: Sequence[Role], k: int) -> list[tuple[Role, ...]]:
    from itertools import combinations

    return [tuple(sorted(c, key=lambda r: r.value)) for c in combinations(pool, k)]


def role_population(
    occurrence_targets: dict[Role, int],
    specialization_rows: dict[int, tuple[int, list[tuple[frozenset, int]]]],
    epoch: datetime = DEFAULT_EPOCH,
) -> RolePopulationTruth:
    """Build a credit population hitting exact per-role occurrence counts and
    exact role-combination counts.

    ``specialization_rows`` maps a role-set cardinality to (total user count,
    listed top combinations with user counts); users beyond the listed
    combinations are spread over filler combinations of common roles, each
    kept strictly below the third-listed count so the listed ranking is
    preserved.
    """
    combo_users: dict[tuple[Role, ...], int] = {}
    for cardinality, (total, listed) in sorted(specialization_rows.items()):
        assigned = 0
        floor = None
        for roles, count in listed:
            combo = tuple(sorted(roles, key=lambda r: r.value))
            if len(combo) != cardinality:
                raise ValueError(f"combination {combo} has wrong cardinality")
            combo_users[combo] = combo_users.get(combo, 0) + count
            assigned += count
            floor = count
        remaining = total - assigned
        if remaining < 0:
            raise ValueError(f"listed combinations exceed total for cardinality {cardinality}")
        if remaining and cardinality > 1:
            # single-role users are placed by the occurrence-capped
            # allocation below, not by fillers
            cap = max(1, (floor or remaining) - 1)
            listed_set = {tuple(sorted(r, key=lambda x: x.value)) for r, _ in listed}
            fillers = [c for c in _combinations(_FILLER_ROLES, cardinality)
                       if c not in listed_set]
            idx = 0
            while remaining > 0:
                if idx >= len(fillers):
                    raise ValueError(f"not enough filler combinations for cardinality {cardinality}")
                take = min(cap, remaining)
                combo_users[fillers[idx]] = combo_users.get(fillers[idx], 0) + take
                remaining -= take
                idx += 1

    # Singles absorb whatever occurrence budget the multi-role users leave.
    multi_base: dict[Role, int] = {role: 0 for role in Role}
    for combo, users in combo_users.items():
        if len(combo) > 1:
            for role in combo:
                multi_base[role] += users
    single_total = specialization_rows.get(1, (0, []))[0]
    caps = {role: occurrence_targets.get(role, 0) - multi_base[role] for role in Role}
    if any(v < 0 for v in caps.values()):
        raise ValueError("occurrence targets too small for the combination plan")
    if sum(caps.values()) < single_total:
        raise ValueError("occurrence targets cannot host the single-role users")
    listed_singles = {c: n for c, n in combo_users.items() if len(c) == 1}
    single_remaining = single_total - sum(listed_singles.values())
    cap_sum = sum(caps.values())
    allocation: dict[Role, int] = {}
    fractions = []
    for role in Role:
        cap = caps[role] - listed_singles.get((role,), 0)
        share = single_remaining * caps[role] / cap_sum
        take = min(cap, int(share))
        allocation[role] = take
        fractions.append((share - int(share), role.value, role))
    leftover = single_remaining - sum(allocation.values())
    for _, _, role in sorted(fractions, reverse=True):
        if leftover == 0:
            break
        if allocation[role] < caps[role] - listed_singles.get((role,), 0):
            allocation[role] += 1
            leftover -= 1
    if leftover:
        raise ValueError("could not place all single-role users")
    for role, extra in allocation.items():
        if extra:
            combo = (role,)
            combo_users[combo] = combo_users.get(combo, 0) + extra

    # Materialize users, then top up occurrences round-robin.
    users: list[tuple[str, tuple[Role, ...]]] = []
    for combo in sorted(combo_users, key=lambda c: tuple(r.value for r in c)):
        for _ in range(combo_users[combo]):
            users.append((f"user{len(users):05d}", combo))
    occurrences: list[tuple[str, Role]] = []
    holders: dict[Role, list[str]] = {role: [] for role in Role}
    base_counts: dict[Role, int] = {role: 0 for role in Role}
    for login, combo in users:
        for role in combo:
            occurrences.append((login, role))
            holders[role].append(login)
            base_counts[role] += 1
    for role in Role:
        deficit = occurrence_targets.get(role, 0) - base_counts[role]
        if deficit < 0:
            raise ValueError(f"base occurrences exceed target for {role.value}")
        pool = holders[role]
        if deficit and not pool:
            raise ValueError(f"no user holds {role.value} to absorb extra occurrences")
        for k in range(deficit):
            occurrences.append((pool[k % len(pool)], role))

    # Pack occurrences into advisories; a user appears at most once per record.
    open_records: list[list[tuple[str, Role]]] = []
    for login, role in occurrences:
        placed = False
        for bucket in open_records:
            if len(bucket) < 6 and all(entry[0] != login for entry in bucket):
                bucket.append((login, role))
                placed = True
                break
        if not placed:
            open_records.append([(login, role)])
    records = []
    for i, bucket in enumerate(open_records):
        reviewed_at = day(i / 24.0, epoch)
        records.append(AdvisoryRecord(
            ghsa_id=make_ghsa_id(i),
            published_at=reviewed_at - timedelta(hours=1),
            github_reviewed_at=reviewed_at,
            credits=tuple(Credit(user_login=login, role=role) for login, role in bucket),
            reviewed=True,
        ))

    cardinality_counts: dict[int, dict[tuple[Role, ...], int]] = {}
    for combo, count in combo_users.items():
        cardinality_counts.setdefault(len(combo), {})[combo] = count
    return RolePopulationTruth(
        records=records,
        role_occurrences={role: occurrence_targets.get(role, 0) for role in Role},
        combination_counts=cardinality_counts,
        distinct_users=len(users),
    )


# --- flow and latency fixtures ----------------------------------------------

def flow_split_records(
    gra_origin: int,
    ghsa_then_gra: int,
    nvd_then_gra: int,
    epoch: datetime = DEFAULT_EPOCH,
) -> list[AdvisoryRecord]:
    """Reviewed advisories whose flow tuples put ``gra_origin`` flows out of
    the GRA platform and the other two counts into it."""
    records = []
    idx = 0
    for _ in range(gra_origin):
        records.append(AdvisoryRecord(
            ghsa_id=make_ghsa_id(idx),
            repository_advisory_url=f"https://github.com/o/r/security/advisories/{make_ghsa_id(idx)}",
            gra_published_at=day(0, epoch),
            published_at=day(1, epoch),
            github_reviewed_at=day(1.5, epoch),
            reviewed=True,
        ))
        idx += 1
    for _ in range(ghsa_then_gra):
        records.append(AdvisoryRecord(
            ghsa_id=make_ghsa_id(idx),
            repository_advisory_url=f"https://github.com/o/r/security/advisories/{make_ghsa_id(idx)}",
            published_at=day(0, epoch),
            gra_published_at=day(1, epoch),
            github_reviewed_at=day(1.5, epoch),
            reviewed=True,
        ))
        idx += 1
    for _ in range(nvd_then_gra):
        records.append(AdvisoryRecord(
            ghsa_id=make_ghsa_id(idx),
            repository_advisory_url=f"https://github.com/o/r/security/advisories/{make_ghsa_id(idx)}",
            nvd_published_at=day(0, epoch),
            gra_published_at=day(1, epoch),
            published_at=day(1, epoch),
            github_reviewed_at=day(1.5, epoch),
            reviewed=True,
        ))
        idx += 1
    return records


def source_mix_records(
    gra: int,
    nvd: int,
    other: int,
    epoch: datetime = DEFAULT_EPOCH,
) -> list[AdvisoryRecord]:
    """Reviewed records with exact source-classification counts."""
    records = []
    idx = 0
    for count, kind in ((gra, "gra"), (nvd, "nvd"), (other, "other")):
        for _ in range(count):
            reviewed_at = day(idx / 1000.0, epoch)
            records.append(AdvisoryRecord(
                ghsa_id=make_ghsa_id(idx),
                repository_advisory_url=(
                    f"https://github.com/o/r/security/advisories/{make_ghsa_id(idx)}"
                    if kind == "gra" else None
                ),
                nvd_published_at=day(idx / 1000.0 - 0.5, epoch) if kind == "nvd" else None,
                published_at=reviewed_at - timedelta(hours=2),
                github_reviewed_at=reviewed_at,
                reviewed=True,
            ))
            idx += 1
    return records


def exponential_latency_records(
    n: int,
    mean_days: float,
    seed: int,
    gra: bool = True,
    epoch: datetime = DEFAULT_EPOCH,
) -> list[AdvisoryRecord]:
    """Reviewed records whose time-to-review lags are exponential with the
    given mean; publish times spread hourly from the epoch."""
    rng = np.random.default_rng(seed)
    lags = rng.exponential(mean_days, n)
    records = []
    for i, lag in enumerate(lags):
        publish = day(i / 24.0, epoch)
        gid = make_ghsa_id(i)
        records.append(AdvisoryRecord(
            ghsa_id=gid,
            repository_advisory_url=(
                f"https://github.com/o/r/security/advisories/{gid}" if gra else None
            ),
            gra_published_at=publish if gra else None,
            published_at=publish,
            nvd_published_at=None if gra else publish,
            github_reviewed_at=publish + timedelta(seconds=round(float(lag) * 86400)),
            reviewed=True,
        ))
    return records


def threshold_split_records(
    n_within: int,
    n_beyond: int,
    threshold_days: float,
    gra: bool = True,
    epoch: datetime = DEFAULT_EPOCH,
) -> list[AdvisoryRecord]:
    """Reviewed records with exactly ``n_within`` lags at half the threshold
    and ``n_beyond`` at twice the threshold."""
    records = []
    idx = 0
    for count, factor in ((n_within, 0.5), (n_beyond, 2.0)):
        for _ in range(count):
            publish = day(idx / 24.0, epoch)
            gid = make_ghsa_id(idx)
            records.append(AdvisoryRecord(
                ghsa_id=gid,
                repository_advisory_url=(
                    f"https://github.com/o/r/security/advisories/{gid}" if gra else None
                ),
                gra_published_at=publish if gra else None,
                published_at=publish,
                github_reviewed_at=publish + timedelta(
                    seconds=round(threshold_days * factor * 86400)
                ),
                reviewed=True,
            ))
            idx += 1
    return records


# --- provider fixture worlds -------------------------------------------------

def _ok(body) -> ApiResponse:
    return ApiResponse(status=200, headers={}, body=body)


def write_advisory_pages(
    root: str | Path,
    payloads: Sequence[dict],
    per_page: int = 100,
) -> None:
    """Record the paginated global-advisories listing, ending with a short or
    empty page so pagination terminates."""
    page = 1
    for start in range(0, len(payloads), per_page):
        write_fixture(root, advisories_page_request(page, per_page),
                      _ok(list(payloads[start:start + per_page])))
        page += 1
    if len(payloads) % per_page == 0:
        write_fixture(root, advisories_page_request(page, per_page), _ok([]))


def advisory_payload(
    index: int,
    *,
    reviewed: bool = True,
    published_at: datetime | None = None,
    reviewed_at: datetime | None = None,
    nvd_published_at: datetime | None = None,
    cve_id: str | None = None,
    gra_url: str | None = None,
    source_code_location: str | None = None,
    ecosystem: str = "npm",
    package: str | None = None,
    first_patched_version: str | None = None,
    references: Sequence[str] = (),
    credits: Sequence[tuple[str, str]] = (),
    severity: str = "medium",
) -> dict:
    """One advisory object in the global-advisories API shape."""
    published_at = published_at or day(index / 24.0)
    if reviewed and reviewed_at is None:
        reviewed_at = published_at + timedelta(hours=3)
    payload = {
        "ghsa_id": make_ghsa_id(index),
        "cve_id": cve_id,
        "severity": severity,
        "published_at": published_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
        "nvd_published_at": nvd_published_at.strftime("%Y-%m-%dT%H:%M:%SZ")
        if nvd_published_at else None,
        "github_reviewed_at": reviewed_at.strftime("%Y-%m-%dT%H:%M:%SZ")
        if reviewed and reviewed_at else None,
        "repository_advisory_url": gra_url,
        "source_code_location": source_code_location,
        "references": list(references),
        "vulnerabilities": [],
        "credits": [{"user": {"login": login}, "type": role} for login, role in credits],
    }
    if package:
        payload["vulnerabilities"].append({
            "package": {"ecosystem": ecosystem, "name": package},
            "first_patched_version": first_patched_version,
        })
    return payload


def write_gra_fixture(root, gra_url: str, published: datetime | None, status: int = 200) -> None:
    request = gra_request(gra_url)
    if request is None:
        raise ValueError(f"not a GRA URL: {gra_url}")
    if status != 200:
        write_fixture(root, request, ApiResponse(status=status, headers={}, body={}))
        return
    write_fixture(root, request, _ok({
        "published_at": published.strftime("%Y-%m-%dT%H:%M:%SZ"),
    }))


def write_nvd_fixture(root, cve_id: str, published: datetime | None, status: int = 200) -> None:
    request = ApiRequest(service="nvd", path="/cves", params=(("cveId", cve_id),))
    if status != 200 or published is None:
        write_fixture(root, request, ApiResponse(status=status, headers={}, body={"vulnerabilities": []}))
        return
    write_fixture(root, request, _ok({
        "vulnerabilities": [{"cve": {"published": published.strftime("%Y-%m-%dT%H:%M:%SZ")}}],
    }))


def write_history_fixture(root, db: EcosystemDb, reference_path: str,
                          commit_times: Sequence[datetime]) -> None:
    write_fixture(root, history_request(db, reference_path), _ok({
        "commits": [
            {"sha": f"{i:040x}", "committed_at": ts.strftime("%Y-%m-%dT%H:%M:%SZ")}
            for i, ts in enumerate(commit_times)
        ],
    }))


def write_registry_fixture(root, system: str, package: str, version: str,
                           published: datetime, status: int = 200) -> None:
    request = registry_version_request(system, package, version)
    if status != 200:
        write_fixture(root, request, ApiResponse(status=status, headers={}, body={}))
        return
    write_fixture(root, request, _ok({
        "publishedAt": published.strftime("%Y-%m-%dT%H:%M:%SZ"),
    }))


def write_user_fixtures(root, login: str, created_at: datetime, followers: int,
                        public_repos: int, repo_stars: Sequence[int]) -> None:
    write_fixture(root, user_request(login), _ok({
        "login": login,
        "created_at": created_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
        "followers": followers,
        "public_repos": public_repos,
    }))
    stars = list(repo_stars)
    page = 1
    for start in range(0, len(stars), 100):
        write_fixture(root, user_repos_request(login, page),
                      _ok([{"stargazers_count": s} for s in stars[start:start + 100]]))
        page += 1
    if len(stars) % 100 == 0:
        write_fixture(root, user_repos_request(login, page), _ok([]))


def write_project_fixture(root, slug: str, stars: int, open_issues: int,
                          security_policy: float | None, maintained: float | None) -> None:
    checks = []
    if security_policy is not None:
        checks.append({"name": "Security-Policy", "score": security_policy})
    if maintained is not None:
        checks.append({"name": "Maintained", "score": maintained})
    write_fixture(root, project_request(slug), _ok({
        "starsCount": stars,
        "openIssuesCount": open_issues,
        "scorecard": {"checks": checks},
    }))


@dataclass
class IngestionWorldTruth:
    """Ground truth of the standard ingestion fixture world."""

    payload_count: int = 0
    gra_times: dict[str, datetime] = field(default_factory=dict)
    nvd_times: dict[str, datetime] = field(default_factory=dict)
    ecosystem_times: dict[str, dict[EcosystemDb, datetime]] = field(default_factory=dict)
    patch_times: dict[str, datetime] = field(default_factory=dict)
    failing_gra: set = field(default_factory=set)
    profiles: dict[str, dict] = field(default_factory=dict)
    projects: dict[str, dict] = field(default_factory=dict)


def build_ingestion_world(root: str | Path, bulk: int = 40) -> IngestionWorldTruth:
    """Lay down a complete fixture directory: a handful of feature-specific
    advisories plus a ``bulk`` block with patch/review lags rich enough to
    fit the queueing model. Returns the expected enrichment values."""
    root = Path(root)
    truth = IngestionWorldTruth()
    payloads: list[dict] = []

    def gid(i: int) -> str:
        return make_ghsa_id(i)

    # 0: GRA timestamp + rustsec reference, two commits (earliest wins).
    gra_url = f"https://github.com/acme/lib/security/advisories/{gid(0)}"
    payloads.append(advisory_payload(
        0, gra_url=gra_url, source_code_location="https://github.com/Acme/lib",
        references=[f"https://rustsec.org/advisories/RUSTSEC-2022-{gid(0)[-4:]}.html"],
        credits=[("alice", "analyst")],
        ecosystem="rust",
    ))
    truth.gra_times[gid(0)] = day(-5)
    write_gra_fixture(root, gra_url, truth.gra_times[gid(0)])
    rs_path = f"/advisories/RUSTSEC-2022-{gid(0)[-4:]}.html"
    truth.ecosystem_times[gid(0)] = {EcosystemDb.rustsec: day(-3)}
    write_history_fixture(root, EcosystemDb.rustsec, rs_path, [day(-1), day(-3)])

    # 1: NVD fill through the CVE, plus a patched npm release.
    payloads.append(advisory_payload(
        1, cve_id="CVE-2022-10001", package="left-pad",
        first_patched_version="1.2.3",
        source_code_location="https://github.com/acme/webapp",
        credits=[("bob", "reporter"), ("alice", "remediation_developer")],
    ))
    truth.nvd_times[gid(1)] = day(-2)
    write_nvd_fixture(root, "CVE-2022-10001", truth.nvd_times[gid(1)])
    truth.patch_times[gid(1)] = day(-1)
    write_registry_fixture(root, "npm", "left-pad", "1.2.3", truth.patch_times[gid(1)])

    # 2: unreviewed; enrichment must leave it untouched.
    payloads.append(advisory_payload(
        2, reviewed=False, cve_id="CVE-2022-10002",
        gra_url=f"https://github.com/acme/lib/security/advisories/{gid(2)}",
    ))

    # 3: GRA lookup fails (404) and is counted, record unchanged.
    failing_url = f"https://github.com/acme/flaky/security/advisories/{gid(3)}"
    payloads.append(advisory_payload(3, gra_url=failing_url,
                                     credits=[("carol", "analyst")]))
    truth.failing_gra.add(gid(3))
    write_gra_fixture(root, failing_url, None, status=404)

    # 4: swift ecosystem, outside the registry allowlist.
    payloads.append(advisory_payload(
        4, ecosystem="swift", package="swift-nio", first_patched_version="2.0.0",
        credits=[("carol", "finder")],
    ))

    # bulk block: direct reviews ~2 days after patch, NVD-first ~40-80 days.
    for k in range(bulk):
        i = 5 + k
        publish = day(k / 4.0)
        nvd_first = k % 5 in (0, 1)  # 40% routed through NVD first
        lag = 40.0 + (k % 7) * 6.0 if nvd_first else 1.0 + (k % 5) * 0.5
        reviewed_at = publish + timedelta(days=lag)
        payloads.append(advisory_payload(
            i,
            published_at=publish,
            reviewed_at=reviewed_at,
            nvd_published_at=publish + timedelta(hours=6) if nvd_first else None,
            gra_url=None if nvd_first else
            f"https://github.com/bulk/repo{k % 7}/security/advisories/{gid(i)}",
            source_code_location=f"https://github.com/bulk/repo{k % 7}",
            package=f"pkg-{k}", first_patched_version="2.0.0",
            credits=[(f"reviewer{k % 6}", "analyst")],
        ))
        if not nvd_first:
            truth.gra_times[gid(i)] = publish
            write_gra_fixture(root, payloads[-1]["repository_advisory_url"], publish)
        truth.patch_times[gid(i)] = publish - timedelta(hours=12)
        write_registry_fixture(root, "npm", f"pkg-{k}", "2.0.0", truth.patch_times[gid(i)])

    write_advisory_pages(root, payloads, per_page=100)
    truth.payload_count = len(payloads)

    # Social fixtures for every credited login and linked repository.
    logins = sorted({login for p in payloads for login, _ in
                     [(c["user"]["login"], c["type"]) for c in p["credits"]]})
    for j, login in enumerate(logins):
        profile = {
            "created_at": day(-700 - j * 10),
            "followers": 10 + j * 7,
            "public_repos": 3 + j,
            "stars": [j, j * 2, j * 3],
        }
        truth.profiles[login] = profile
        write_user_fixtures(root, login, profile["created_at"], profile["followers"],
                            profile["public_repos"], profile["stars"])
    slugs = {"acme/lib": True, "acme/webapp": False}
    for k in range(bulk):
        # repo{k%7} is GRA-linked whenever any direct advisory points at it
        slug = f"bulk/repo{k % 7}"
        slugs[slug] = slugs.get(slug, False) or (k % 5 not in (0, 1))
    for j, (slug, gra_linked) in enumerate(sorted(slugs.items())):
        project = {
            "stars": 100 + j * 11,
            "open_issues": 5 + j,
            "security_policy": 10.0 if gra_linked else 0.0,
            "maintained": 7.0,
        }
        truth.projects[slug] = project
        write_project_fixture(root, slug, project["stars"], project["open_issues"],
                              project["security_policy"], project["maintained"])
    return truth
