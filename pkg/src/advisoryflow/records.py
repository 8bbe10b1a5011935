"""Advisory data model: one record per GHSA entry plus enrichment metadata.

The record mirrors the fields exposed by the GitHub global advisories API
together with the timestamps added during enrichment (GRA publication, NVD
backfill, ecosystem databases, first patched release). All timestamps are
timezone-aware UTC and compared at seconds precision.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum


class Severity(str, Enum):
    critical = "critical"
    high = "high"
    medium = "medium"
    low = "low"
    unknown = "unknown"


class Ecosystem(str, Enum):
    maven = "maven"
    composer = "composer"
    npm = "npm"
    pip = "pip"
    go = "go"
    rust = "rust"
    rubygems = "rubygems"
    nuget = "nuget"
    swift = "swift"
    erlang = "erlang"
    actions = "actions"
    pub = "pub"
    other = "other"


class Role(str, Enum):
    analyst = "analyst"
    reporter = "reporter"
    finder = "finder"
    remediation_developer = "remediation_developer"
    remediation_reviewer = "remediation_reviewer"
    coordinator = "coordinator"
    remediation_verifier = "remediation_verifier"
    other = "other"
    sponsor = "sponsor"
    tool = "tool"


class EcosystemDb(str, Enum):
    """Ecosystem advisory databases whose publish dates we track."""

    rustsec = "rustsec"
    friendsofphp = "friendsofphp"
    pypa = "pypa"
    rubysec = "rubysec"
    govulndb = "govulndb"


class AdvisorySource(str, Enum):
    """Where an advisory entered the pipeline from."""

    gra = "gra"
    nvd = "nvd"
    other = "other"


GHSA_ID_PATTERN = re.compile(r"^GHSA-[0-9a-z]{4}-[0-9a-z]{4}-[0-9a-z]{4}$")

#: Earliest timestamp considered plausible for any advisory event.
MIN_TIMESTAMP = datetime(2000, 1, 1, tzinfo=timezone.utc)

#: Start of the stabilized pipeline after the NVD import automation and
#: backfill. Analyses that split "before/after automation" cut here.
POST_AUTOMATION_CUTOFF = datetime(2022, 6, 1, tzinfo=timezone.utc)


@dataclass(frozen=True)
class AffectedPackage:
    package_name: str
    ecosystem: Ecosystem
    first_patched_version: str | None = None


@dataclass(frozen=True)
class Credit:
    user_login: str
    role: Role


@dataclass(frozen=True)
class UserProfile:
    """Profile metadata of a credited user at enrichment time."""

    login: str
    account_created_at: datetime
    followers: int
    public_repos: int
    total_stars: int


@dataclass(frozen=True)
class RepoMetadata:
    """Popularity and security-health metadata of a linked repository.

    Scorecard values are consumed as registry-provided fields; they are never
    computed here. ``gra_linked`` is true when at least one advisory pointing
    at this repository carries a repository advisory URL.
    """

    slug: str
    stars: int
    open_issues: int
    security_policy_score: float | None = None
    maintained_score: float | None = None
    gra_linked: bool = False


@dataclass(frozen=True)
class AdvisoryRecord:
    """One security advisory with raw and enriched timestamps.

    ``reviewed`` is stored explicitly rather than inferred so that unreviewed
    advisories with partial metadata stay representable; validation enforces
    that it agrees with the presence of ``github_reviewed_at``.
    """

    ghsa_id: str
    cve_id: str | None = None
    severity: Severity = Severity.unknown
    ecosystem: Ecosystem = Ecosystem.other
    source_code_location: str | None = None
    repository_advisory_url: str | None = None
    published_at: datetime | None = None
    nvd_published_at: datetime | None = None
    github_reviewed_at: datetime | None = None
    gra_published_at: datetime | None = None
    ecosystem_published_at: dict[EcosystemDb, datetime] = field(default_factory=dict)
    patched_at: datetime | None = None
    references: tuple[str, ...] = ()
    vulnerabilities: tuple[AffectedPackage, ...] = ()
    credits: tuple[Credit, ...] = ()
    reviewed: bool = False

    def timestamps(self) -> dict[str, datetime]:
        """All present timestamps keyed by field name (map entries use
        ``ecosystem_published_at.<db>``)."""
        out: dict[str, datetime] = {}
        for name in (
            "published_at",
            "nvd_published_at",
            "github_reviewed_at",
            "gra_published_at",
            "patched_at",
        ):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        for db, ts in self.ecosystem_published_at.items():
            out[f"ecosystem_published_at.{db.value}"] = ts
        return out


def classify_source(record: AdvisoryRecord) -> AdvisorySource:
    """Origin of an advisory: GRA when a repository advisory URL exists,
    else NVD when an NVD publish date exists, else other."""
    if record.repository_advisory_url:
        return AdvisorySource.gra
    if record.nvd_published_at is not None:
        return AdvisorySource.nvd
    return AdvisorySource.other


def normalize_repo_url(raw: str) -> str | None:
    """Normalize a repository reference to a lowercase ``owner/repo`` slug.

    Accepts URLs with or without protocol, strips host casing, ``www.``,
    trailing slashes and a ``.git`` suffix. A bare ``owner/repo`` pair is
    accepted as already normalized (so the function is idempotent). Anything
    not referring to a GitHub repository yields None.
    """
    s = (raw or "").strip()
    if not s:
        return None
    for sep in ("#", "?"):
        s = s.split(sep, 1)[0]
    s = s.strip("/")
    if "://" in s:
        scheme, _, rest = s.partition("://")
        if scheme.lower() not in ("http", "https"):
            return None
        host, _, path = rest.partition("/")
    else:
        first, _, remainder = s.partition("/")
        if "." in first or "@" in first or ":" in first:
            host, path = first, remainder
        else:
            # Bare owner/repo candidate; GitHub logins never contain dots.
            host, path = "github.com", s
    host = host.lower()
    if host.startswith("www."):
        host = host[4:]
    if host != "github.com":
        return None
    segments = [seg for seg in path.split("/") if seg]
    if len(segments) < 2:
        return None
    owner, repo = segments[0], segments[1]
    if repo.lower().endswith(".git"):
        repo = repo[:-4]
    if not owner or not repo:
        return None
    return f"{owner}/{repo}".lower()


def validate_record(record: AdvisoryRecord, *, now: datetime | None = None) -> list[str]:
    """Check a single record against the schema invariants.

    Returns a list of human-readable problems; an empty list means valid.
    Timestamps must be UTC, no earlier than 2000-01-01 and no later than the
    wall clock at validation time.
    """
    problems: list[str] = []
    now = now or datetime.now(timezone.utc)
    if not GHSA_ID_PATTERN.match(record.ghsa_id):
        problems.append(f"ghsa_id {record.ghsa_id!r} does not match GHSA-xxxx-xxxx-xxxx")
    if record.reviewed != (record.github_reviewed_at is not None):
        problems.append("reviewed flag disagrees with presence of github_reviewed_at")
    for name, ts in record.timestamps().items():
        if ts.tzinfo is None or ts.utcoffset() != timezone.utc.utcoffset(None):
            problems.append(f"{name} is not an aware UTC timestamp")
            continue
        if ts < MIN_TIMESTAMP:
            problems.append(f"{name} precedes 2000-01-01")
        if ts > now:
            problems.append(f"{name} lies in the future")
    for pkg in record.vulnerabilities:
        if not pkg.package_name:
            problems.append("affected package with empty package_name")
    for credit in record.credits:
        if not credit.user_login:
            problems.append("credit with empty user_login")
    return problems


def validate_user_profile(profile: UserProfile) -> list[str]:
    problems = []
    for name in ("followers", "public_repos", "total_stars"):
        if getattr(profile, name) < 0:
            problems.append(f"{name} is negative")
    return problems


def validate_repo_metadata(meta: RepoMetadata) -> list[str]:
    problems = []
    if meta.stars < 0 or meta.open_issues < 0:
        problems.append("counts must be non-negative")
    for name in ("security_policy_score", "maintained_score"):
        score = getattr(meta, name)
        if score is not None and not 0.0 <= score <= 10.0:
            problems.append(f"{name} outside [0, 10]")
    return problems
