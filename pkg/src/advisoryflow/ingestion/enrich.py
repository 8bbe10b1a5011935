"""Enrichment of reviewed advisories with timestamps and social metadata.

Four temporal steps fill missing fields, in order: GRA publication time, NVD
publication time via the CVE, ecosystem-database publication dates from the
first commit introducing the advisory, and the release time of the first
patched version from the package registry. A fifth step fetches user
profiles and repository metadata. Enrichment is monotone (it never
overwrites a present value) and therefore idempotent against a fixed
provider; per-entity failures are counted, never fatal.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable
from urllib.parse import urlsplit

from ..records import (
    AdvisoryRecord,
    Ecosystem,
    EcosystemDb,
    RepoMetadata,
    UserProfile,
    normalize_repo_url,
    validate_repo_metadata,
    validate_user_profile,
)
from ..store import parse_timestamp
from .github import gra_request, sum_user_stars, user_request
from .providers import ApiRequest, IngestionError

#: host / path-prefix allowlist, one pattern per ecosystem database.
ECOSYSTEM_DB_PATTERNS: dict[EcosystemDb, tuple[str, str]] = {
    EcosystemDb.rustsec: ("rustsec.org", "/advisories/"),
    EcosystemDb.friendsofphp: ("github.com", "/friendsofphp/security-advisories"),
    EcosystemDb.pypa: ("github.com", "/pypa/advisory-database"),
    EcosystemDb.rubysec: ("github.com", "/rubysec/ruby-advisory-db"),
    EcosystemDb.govulndb: ("pkg.go.dev", "/vuln/"),
}

#: deps.dev system identifiers for the ecosystems it indexes.
REGISTRY_SYSTEMS: dict[Ecosystem, str] = {
    Ecosystem.pip: "pypi",
    Ecosystem.go: "go",
    Ecosystem.rubygems: "rubygems",
    Ecosystem.npm: "npm",
    Ecosystem.maven: "maven",
    Ecosystem.nuget: "nuget",
}


@dataclass
class EnrichmentReport:
    gra_timestamps_added: int = 0
    nvd_timestamps_filled: int = 0
    ecosystem_timestamps_added: dict[str, int] = field(default_factory=dict)
    patched_at_resolved: int = 0
    user_profiles_fetched: int = 0
    repo_metadata_fetched: int = 0
    failures: dict[str, int] = field(default_factory=dict)
    ecosystem_multi_match: dict[str, int] = field(default_factory=dict)

    def count_failure(self, step: str) -> None:
        self.failures[step] = self.failures.get(step, 0) + 1

    def to_json_dict(self) -> dict:
        return {
            "gra_timestamps_added": self.gra_timestamps_added,
            "nvd_timestamps_filled": self.nvd_timestamps_filled,
            "ecosystem_timestamps_added": dict(sorted(self.ecosystem_timestamps_added.items())),
            "patched_at_resolved": self.patched_at_resolved,
            "user_profiles_fetched": self.user_profiles_fetched,
            "repo_metadata_fetched": self.repo_metadata_fetched,
            "failures": dict(sorted(self.failures.items())),
            "ecosystem_multi_match": dict(sorted(self.ecosystem_multi_match.items())),
        }


def history_request(db: EcosystemDb, reference_path: str) -> ApiRequest:
    """Commit-history lookup for an advisory file in a database repository."""
    return ApiRequest(
        service="history",
        path=f"/{db.value}/commits",
        params=(("path", reference_path),),
    )


def registry_version_request(system: str, package: str, version: str) -> ApiRequest:
    return ApiRequest(
        service="depsdev",
        path=f"/v3/systems/{system}/packages/{package}/versions/{version}",
    )


def project_request(slug: str) -> ApiRequest:
    return ApiRequest(
        service="depsdev",
        path="/v3alpha/projects",
        params=(("id", f"github.com/{slug}"),),
    )


def enrich_gra_timestamp(
    record: AdvisoryRecord, provider, report: EnrichmentReport
) -> AdvisoryRecord:
    """Fill gra_published_at from the originating repository advisory."""
    if not record.repository_advisory_url or record.gra_published_at is not None:
        return record
    request = gra_request(record.repository_advisory_url)
    if request is None:
        report.count_failure("gra")
        return record
    try:
        response = provider.fetch(request)
        if not response.ok or not isinstance(response.body, dict):
            raise IngestionError(f"HTTP {response.status}")
        published = parse_timestamp(response.body["published_at"])
    except (IngestionError, KeyError, ValueError, TypeError):
        report.count_failure("gra")
        return record
    report.gra_timestamps_added += 1
    return replace(record, gra_published_at=published)


def enrich_nvd_timestamp(
    record: AdvisoryRecord, provider, report: EnrichmentReport
) -> AdvisoryRecord:
    """Fill a missing nvd_published_at by querying the CVE."""
    if record.nvd_published_at is not None or not record.cve_id:
        return record
    request = ApiRequest(service="nvd", path="/cves", params=(("cveId", record.cve_id),))
    try:
        response = provider.fetch(request)
        if not response.ok or not isinstance(response.body, dict):
            raise IngestionError(f"HTTP {response.status}")
        entries = response.body.get("vulnerabilities") or []
        published = parse_timestamp(entries[0]["cve"]["published"])
    except (IngestionError, LookupError, ValueError, TypeError):
        report.count_failure("nvd")
        return record
    report.nvd_timestamps_filled += 1
    return replace(record, nvd_published_at=published)


def match_ecosystem_references(record: AdvisoryRecord) -> dict[EcosystemDb, list[str]]:
    """Reference URLs grouped by the ecosystem database they point into."""
    matches: dict[EcosystemDb, list[str]] = {}
    for ref in record.references:
        parts = urlsplit(ref if "://" in ref else f"https://{ref}")
        host = parts.netloc.lower().removeprefix("www.")
        path = parts.path
        for db, (want_host, prefix) in ECOSYSTEM_DB_PATTERNS.items():
            if host == want_host and path.lower().startswith(prefix):
                matches.setdefault(db, []).append(path)
    return matches


def enrich_ecosystem_timestamps(
    record: AdvisoryRecord, provider, report: EnrichmentReport
) -> AdvisoryRecord:
    """Fill ecosystem_published_at from the first commit introducing the
    advisory into each referenced database; the earliest commit wins when
    several references map to the same database."""
    matches = match_ecosystem_references(record)
    if not matches:
        return record
    added = dict(record.ecosystem_published_at)
    changed = False
    for db, paths in sorted(matches.items()):
        if db in added:
            continue
        if len(paths) > 1:
            report.ecosystem_multi_match[db.value] = (
                report.ecosystem_multi_match.get(db.value, 0) + 1
            )
        earliest = None
        failed = False
        for path in paths:
            try:
                response = provider.fetch(history_request(db, path))
                if not response.ok or not isinstance(response.body, dict):
                    raise IngestionError(f"HTTP {response.status}")
                commits = response.body.get("commits") or []
                times = [parse_timestamp(c["committed_at"]) for c in commits]
            except (IngestionError, LookupError, ValueError, TypeError):
                failed = True
                continue
            for ts in times:
                if earliest is None or ts < earliest:
                    earliest = ts
        if earliest is None:
            if failed or paths:
                report.count_failure(f"ecosystem.{db.value}")
            continue
        added[db] = earliest
        key = db.value
        report.ecosystem_timestamps_added[key] = (
            report.ecosystem_timestamps_added.get(key, 0) + 1
        )
        changed = True
    return replace(record, ecosystem_published_at=added) if changed else record


def enrich_patched_at(
    record: AdvisoryRecord, provider, report: EnrichmentReport
) -> AdvisoryRecord:
    """Fill patched_at with the registry release time of the first listed
    package's first patched version. Only the registry-indexed ecosystems
    participate; when several packages are affected the first one listed is
    sampled."""
    if record.patched_at is not None:
        return record
    system = REGISTRY_SYSTEMS.get(record.ecosystem)
    if system is None or not record.vulnerabilities:
        return record
    first = record.vulnerabilities[0]
    if not first.first_patched_version:
        report.count_failure("patched_at")
        return record
    request = registry_version_request(system, first.package_name, first.first_patched_version)
    try:
        response = provider.fetch(request)
        if not response.ok or not isinstance(response.body, dict):
            raise IngestionError(f"HTTP {response.status}")
        published = parse_timestamp(response.body["publishedAt"])
    except (IngestionError, KeyError, ValueError, TypeError):
        report.count_failure("patched_at")
        return record
    report.patched_at_resolved += 1
    return replace(record, patched_at=published)


def fetch_user_profile(provider, login: str) -> UserProfile:
    response = provider.fetch(user_request(login))
    if not response.ok or not isinstance(response.body, dict):
        raise IngestionError(f"profile of {login}: HTTP {response.status}")
    body = response.body
    profile = UserProfile(
        login=login,
        account_created_at=parse_timestamp(body["created_at"]),
        followers=int(body.get("followers", 0)),
        public_repos=int(body.get("public_repos", 0)),
        total_stars=sum_user_stars(provider, login),
    )
    problems = validate_user_profile(profile)
    if problems:
        raise IngestionError(f"profile of {login}: {'; '.join(problems)}")
    return profile


def fetch_repo_metadata(provider, slug: str, gra_linked: bool) -> RepoMetadata:
    response = provider.fetch(project_request(slug))
    if not response.ok or not isinstance(response.body, dict):
        raise IngestionError(f"project {slug}: HTTP {response.status}")
    body = response.body
    scores: dict[str, float] = {}
    for check in (body.get("scorecard") or {}).get("checks") or []:
        name = check.get("name")
        if name in ("Security-Policy", "Maintained") and check.get("score") is not None:
            scores[name] = float(check["score"])
    meta = RepoMetadata(
        slug=slug,
        stars=int(body.get("starsCount", 0)),
        open_issues=int(body.get("openIssuesCount", 0)),
        security_policy_score=scores.get("Security-Policy"),
        maintained_score=scores.get("Maintained"),
        gra_linked=gra_linked,
    )
    problems = validate_repo_metadata(meta)
    if problems:
        raise IngestionError(f"project {slug}: {'; '.join(problems)}")
    return meta


def enrich_social(
    records: Iterable[AdvisoryRecord],
    provider,
    report: EnrichmentReport | None = None,
    max_workers: int = 4,
) -> tuple[list[UserProfile], list[RepoMetadata], EnrichmentReport]:
    """Fetch one profile per credited login and one metadata row per linked
    repository, over reviewed advisories only.

    A repository is GRA-linked when at least one advisory pointing at it
    carries a repository advisory URL. Requests fan out over a thread pool;
    outputs are sorted by login / slug so results are order-independent.
    """
    report = report if report is not None else EnrichmentReport()
    reviewed = [r for r in records if r.reviewed]
    logins = sorted({c.user_login for r in reviewed for c in r.credits if c.user_login})
    repo_links: dict[str, bool] = {}
    for record in reviewed:
        slug = normalize_repo_url(record.source_code_location or "")
        if slug is None:
            continue
        repo_links[slug] = repo_links.get(slug, False) or bool(record.repository_advisory_url)

    profiles: list[UserProfile] = []
    metas: list[RepoMetadata] = []
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        for login, outcome in zip(logins, pool.map(
            lambda l: _attempt(lambda: fetch_user_profile(provider, l)), logins
        )):
            if outcome is None:
                report.count_failure("user_profile")
            else:
                profiles.append(outcome)
                report.user_profiles_fetched += 1
        slugs = sorted(repo_links)
        for slug, outcome in zip(slugs, pool.map(
            lambda s: _attempt(lambda: fetch_repo_metadata(provider, s, repo_links[s])),
            slugs,
        )):
            if outcome is None:
                report.count_failure("repo_metadata")
            else:
                metas.append(outcome)
                report.repo_metadata_fetched += 1
    return profiles, metas, report


def _attempt(action):
    try:
        return action()
    except (IngestionError, LookupError, ValueError, TypeError):
        return None


@dataclass
class EnrichmentResult:
    records: list[AdvisoryRecord]
    profiles: list[UserProfile]
    repos: list[RepoMetadata]
    report: EnrichmentReport


def enrich_dataset(
    records: Iterable[AdvisoryRecord],
    provider,
    max_workers: int = 4,
) -> EnrichmentResult:
    """Run the full enrichment over a dataset.

    Only reviewed advisories are enriched; unreviewed records pass through
    untouched. Output order equals input order.
    """
    report = EnrichmentReport()
    enriched: list[AdvisoryRecord] = []
    for record in records:
        if record.reviewed:
            record = enrich_gra_timestamp(record, provider, report)
            record = enrich_nvd_timestamp(record, provider, report)
            record = enrich_ecosystem_timestamps(record, provider, report)
            record = enrich_patched_at(record, provider, report)
        enriched.append(record)
    profiles, repos, report = enrich_social(
        enriched, provider, report=report, max_workers=max_workers
    )
    return EnrichmentResult(records=enriched, profiles=profiles, repos=repos, report=report)
