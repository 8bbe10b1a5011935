"""Line-oriented dataset persistence.

One JSON object per line, UTF-8, field names matching the advisory schema.
Timestamps are serialized as RFC 3339 UTC at seconds precision. Loading
validates every line; invalid lines are collected with their line number and
reason instead of being dropped silently.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable

from .records import (
    AdvisoryRecord,
    AffectedPackage,
    Credit,
    Ecosystem,
    EcosystemDb,
    RepoMetadata,
    Role,
    Severity,
    UserProfile,
    validate_record,
)

_RECORD_FIELDS = (
    "ghsa_id",
    "cve_id",
    "severity",
    "ecosystem",
    "source_code_location",
    "repository_advisory_url",
    "published_at",
    "nvd_published_at",
    "github_reviewed_at",
    "gra_published_at",
    "ecosystem_published_at",
    "patched_at",
    "references",
    "vulnerabilities",
    "credits",
    "reviewed",
)


class DatasetError(Exception):
    """Unrecoverable dataset I/O or format failure."""


@dataclass(frozen=True)
class LoadFailure:
    line_no: int
    reason: str


@dataclass
class LoadResult:
    records: list[AdvisoryRecord]
    failures: list[LoadFailure]

    def raise_on_failures(self) -> None:
        if self.failures:
            first = self.failures[0]
            raise DatasetError(
                f"{len(self.failures)} invalid line(s), first at line "
                f"{first.line_no}: {first.reason}"
            )


def parse_timestamp(value: str) -> datetime:
    """Parse an RFC 3339 timestamp; naive values are taken as UTC."""
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def record_to_dict(record: AdvisoryRecord) -> dict:
    def ts(value: datetime | None) -> str | None:
        return None if value is None else format_timestamp(value)

    return {
        "ghsa_id": record.ghsa_id,
        "cve_id": record.cve_id,
        "severity": record.severity.value,
        "ecosystem": record.ecosystem.value,
        "source_code_location": record.source_code_location,
        "repository_advisory_url": record.repository_advisory_url,
        "published_at": ts(record.published_at),
        "nvd_published_at": ts(record.nvd_published_at),
        "github_reviewed_at": ts(record.github_reviewed_at),
        "gra_published_at": ts(record.gra_published_at),
        "ecosystem_published_at": {
            db.value: format_timestamp(when)
            for db, when in sorted(record.ecosystem_published_at.items())
        },
        "patched_at": ts(record.patched_at),
        "references": list(record.references),
        "vulnerabilities": [
            {
                "package_name": pkg.package_name,
                "ecosystem": pkg.ecosystem.value,
                "first_patched_version": pkg.first_patched_version,
            }
            for pkg in record.vulnerabilities
        ],
        "credits": [
            {"user_login": credit.user_login, "role": credit.role.value}
            for credit in record.credits
        ],
        "reviewed": record.reviewed,
    }


def record_from_dict(payload: dict) -> AdvisoryRecord:
    """Build a record from a parsed JSON object, raising ValueError on any
    schema problem (unknown keys, bad enums, malformed timestamps)."""
    if not isinstance(payload, dict):
        raise ValueError("record is not a JSON object")
    unknown = set(payload) - set(_RECORD_FIELDS)
    if unknown:
        raise ValueError(f"unknown fields: {', '.join(sorted(unknown))}")
    if "ghsa_id" not in payload:
        raise ValueError("missing ghsa_id")

    def ts(name: str) -> datetime | None:
        value = payload.get(name)
        if value is None:
            return None
        try:
            return parse_timestamp(value)
        except (ValueError, TypeError) as exc:
            raise ValueError(f"bad timestamp in {name}: {value!r}") from exc

    def enum(cls, name: str, value):
        try:
            return cls(value)
        except ValueError as exc:
            raise ValueError(f"bad {name}: {value!r}") from exc

    eco_published = {}
    for db_name, value in (payload.get("ecosystem_published_at") or {}).items():
        db = enum(EcosystemDb, "ecosystem database", db_name)
        try:
            eco_published[db] = parse_timestamp(value)
        except (ValueError, TypeError) as exc:
            raise ValueError(f"bad timestamp for {db_name}: {value!r}") from exc

    vulnerabilities = []
    for entry in payload.get("vulnerabilities") or ():
        vulnerabilities.append(
            AffectedPackage(
                package_name=entry.get("package_name", ""),
                ecosystem=enum(Ecosystem, "ecosystem", entry.get("ecosystem", "other")),
                first_patched_version=entry.get("first_patched_version"),
            )
        )

    credits = []
    for entry in payload.get("credits") or ():
        credits.append(
            Credit(
                user_login=entry.get("user_login", ""),
                role=enum(Role, "role", entry.get("role")),
            )
        )

    return AdvisoryRecord(
        ghsa_id=payload["ghsa_id"],
        cve_id=payload.get("cve_id"),
        severity=enum(Severity, "severity", payload.get("severity", "unknown")),
        ecosystem=enum(Ecosystem, "ecosystem", payload.get("ecosystem", "other")),
        source_code_location=payload.get("source_code_location"),
        repository_advisory_url=payload.get("repository_advisory_url"),
        published_at=ts("published_at"),
        nvd_published_at=ts("nvd_published_at"),
        github_reviewed_at=ts("github_reviewed_at"),
        gra_published_at=ts("gra_published_at"),
        ecosystem_published_at=eco_published,
        patched_at=ts("patched_at"),
        references=tuple(payload.get("references") or ()),
        vulnerabilities=tuple(vulnerabilities),
        credits=tuple(credits),
        reviewed=bool(payload.get("reviewed", False)),
    )


def save_dataset(records: Iterable[AdvisoryRecord], path: str | Path) -> None:
    """Write records as JSONL. Output is a pure function of the records, so
    repeated saves of the same data are byte-identical."""
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            for record in records:
                fh.write(json.dumps(record_to_dict(record), ensure_ascii=False,
                                    separators=(",", ":")))
                fh.write("\n")
    except OSError as exc:
        raise DatasetError(f"cannot write dataset {path}: {exc}") from exc


def load_dataset(path: str | Path) -> LoadResult:
    """Read a JSONL dataset, validating every line.

    Records failing JSON parsing, schema mapping, invariant validation or
    ghsa_id uniqueness are reported in ``failures`` with 1-based line numbers.
    Blank lines are ignored.
    """
    path = Path(path)
    records: list[AdvisoryRecord] = []
    failures: list[LoadFailure] = []
    seen: set[str] = set()
    try:
        with path.open("r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise DatasetError(f"cannot read dataset {path}: {exc}") from exc
    now = datetime.now(timezone.utc)
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            payload = json.loads(line)
            record = record_from_dict(payload)
        except (json.JSONDecodeError, ValueError) as exc:
            failures.append(LoadFailure(line_no, str(exc)))
            continue
        problems = validate_record(record, now=now)
        if problems:
            failures.append(LoadFailure(line_no, "; ".join(problems)))
            continue
        if record.ghsa_id in seen:
            failures.append(LoadFailure(line_no, f"duplicate ghsa_id {record.ghsa_id}"))
            continue
        seen.add(record.ghsa_id)
        records.append(record)
    return LoadResult(records=records, failures=failures)


def write_validation_report(failures: Iterable[LoadFailure], path: str | Path) -> None:
    """One line per rejection: ``line_no<TAB>reason``."""
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for failure in failures:
            fh.write(f"{failure.line_no}\t{failure.reason}\n")


# --- side tables -----------------------------------------------------------
#
# User profiles and repository metadata live in their own JSONL files next to
# the advisory dataset; both use the same deterministic serialization rules.

def save_profiles(profiles: Iterable[UserProfile], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for p in profiles:
            fh.write(json.dumps({
                "login": p.login,
                "account_created_at": format_timestamp(p.account_created_at),
                "followers": p.followers,
                "public_repos": p.public_repos,
                "total_stars": p.total_stars,
            }, ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")


def load_profiles(path: str | Path) -> list[UserProfile]:
    out = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            payload = json.loads(line)
            out.append(UserProfile(
                login=payload["login"],
                account_created_at=parse_timestamp(payload["account_created_at"]),
                followers=int(payload["followers"]),
                public_repos=int(payload["public_repos"]),
                total_stars=int(payload["total_stars"]),
            ))
    return out


def save_repo_metadata(metas: Iterable[RepoMetadata], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for m in metas:
            fh.write(json.dumps({
                "slug": m.slug,
                "stars": m.stars,
                "open_issues": m.open_issues,
                "security_policy_score": m.security_policy_score,
                "maintained_score": m.maintained_score,
                "gra_linked": m.gra_linked,
            }, ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")


def load_repo_metadata(path: str | Path) -> list[RepoMetadata]:
    out = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            payload = json.loads(line)
            out.append(RepoMetadata(
                slug=payload["slug"],
                stars=int(payload["stars"]),
                open_issues=int(payload["open_issues"]),
                security_policy_score=payload.get("security_policy_score"),
                maintained_score=payload.get("maintained_score"),
                gra_linked=bool(payload.get("gra_linked", False)),
            ))
    return out
