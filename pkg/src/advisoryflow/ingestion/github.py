"""GitHub global-advisories client: request construction, payload parsing and
paginated fetching. All requests go through a provider so fixture replay and
live operation share the same code path."""

from __future__ import annotations

import re
from datetime import datetime

from ..records import (
    AdvisoryRecord,
    AffectedPackage,
    Credit,
    Ecosystem,
    Role,
    Severity,
    normalize_repo_url,
)
from ..store import parse_timestamp
from .providers import ApiRequest, IngestionError

PER_PAGE = 100

_GRA_URL = re.compile(
    r"github\.com/(?P<owner>[^/]+)/(?P<repo>[^/]+)/security/advisories/"
    r"(?P<ghsa_id>GHSA-[0-9a-z-]+)",
    re.IGNORECASE,
)


def advisories_page_request(page: int, per_page: int = PER_PAGE) -> ApiRequest:
    return ApiRequest(
        service="github",
        path="/advisories",
        params=(("page", str(page)), ("per_page", str(per_page))),
    )


def gra_request(repository_advisory_url: str) -> ApiRequest | None:
    """Repository-advisory lookup for a GRA URL; None when unparsable."""
    match = _GRA_URL.search(repository_advisory_url)
    if not match:
        return None
    owner = match.group("owner").lower()
    repo = match.group("repo").lower()
    return ApiRequest(
        service="github",
        path=f"/repos/{owner}/{repo}/security-advisories/{match.group('ghsa_id')}",
    )


def user_request(login: str) -> ApiRequest:
    return ApiRequest(service="github", path=f"/users/{login}")


def user_repos_request(login: str, page: int, per_page: int = PER_PAGE) -> ApiRequest:
    return ApiRequest(
        service="github",
        path=f"/users/{login}/repos",
        params=(("page", str(page)), ("per_page", str(per_page))),
    )


def _timestamp(payload: dict, key: str) -> datetime | None:
    value = payload.get(key)
    if not value:
        return None
    return parse_timestamp(value)


def parse_global_advisory(payload: dict) -> AdvisoryRecord:
    """Map one global-advisory API object onto the record schema.

    Unknown ecosystems and credit types fall back to ``other``; the record's
    top-level ecosystem is the first affected package's.
    """
    vulnerabilities = []
    for entry in payload.get("vulnerabilities") or ():
        package = entry.get("package") or {}
        try:
            ecosystem = Ecosystem(package.get("ecosystem"))
        except ValueError:
            ecosystem = Ecosystem.other
        vulnerabilities.append(AffectedPackage(
            package_name=package.get("name") or "",
            ecosystem=ecosystem,
            first_patched_version=entry.get("first_patched_version"),
        ))

    credits = []
    for entry in payload.get("credits") or ():
        login = (entry.get("user") or {}).get("login") or ""
        try:
            role = Role(entry.get("type"))
        except ValueError:
            role = Role.other
        if login:
            credits.append(Credit(user_login=login, role=role))

    try:
        severity = Severity(payload.get("severity") or "unknown")
    except ValueError:
        severity = Severity.unknown

    references = tuple(
        ref if isinstance(ref, str) else ref.get("url", "")
        for ref in payload.get("references") or ()
    )
    reviewed_at = _timestamp(payload, "github_reviewed_at")
    return AdvisoryRecord(
        ghsa_id=payload["ghsa_id"],
        cve_id=payload.get("cve_id"),
        severity=severity,
        ecosystem=vulnerabilities[0].ecosystem if vulnerabilities else Ecosystem.other,
        source_code_location=normalize_repo_url(payload.get("source_code_location") or ""),
        repository_advisory_url=payload.get("repository_advisory_url"),
        published_at=_timestamp(payload, "published_at"),
        nvd_published_at=_timestamp(payload, "nvd_published_at"),
        github_reviewed_at=reviewed_at,
        references=references,
        vulnerabilities=tuple(vulnerabilities),
        credits=tuple(credits),
        reviewed=reviewed_at is not None,
    )


def fetch_global_advisories(
    provider,
    since: datetime | None = None,
    per_page: int = PER_PAGE,
) -> list[AdvisoryRecord]:
    """Fetch every page of the global advisories listing.

    Pagination stops at the first short or empty page. Records are
    deduplicated by ghsa_id (first occurrence wins); with ``since`` only
    records published at or after it are kept.
    """
    records: dict[str, AdvisoryRecord] = {}
    page = 1
    while True:
        request = advisories_page_request(page, per_page)
        response = provider.fetch(request)
        if not response.ok:
            raise IngestionError(
                f"advisories page {page} failed with HTTP {response.status}"
            )
        body = response.body
        if not isinstance(body, list):
            raise IngestionError(f"advisories page {page} is not a JSON array")
        for payload in body:
            record = parse_global_advisory(payload)
            if since is not None:
                if record.published_at is None or record.published_at < since:
                    continue
            records.setdefault(record.ghsa_id, record)
        if len(body) < per_page:
            break
        page += 1
    return list(records.values())


def sum_user_stars(provider, login: str, per_page: int = PER_PAGE) -> int:
    """Total stargazers over a user's public repositories (paginated)."""
    total = 0
    page = 1
    while True:
        response = provider.fetch(user_repos_request(login, page, per_page))
        if not response.ok:
            raise IngestionError(f"repos of {login}: HTTP {response.status}")
        body = response.body or []
        if not isinstance(body, list):
            raise IngestionError(f"repos of {login}: not a JSON array")
        total += sum(int(repo.get("stargazers_count", 0)) for repo in body)
        if len(body) < per_page:
            return total
        page += 1
