"""Advisory ingestion: provider transport, GitHub client and enrichment."""

from .enrich import (
    EnrichmentReport,
    EnrichmentResult,
    enrich_dataset,
    enrich_ecosystem_timestamps,
    enrich_gra_timestamp,
    enrich_nvd_timestamp,
    enrich_patched_at,
    enrich_social,
)
from .github import fetch_global_advisories, parse_global_advisory
from .providers import (
    ApiRequest,
    ApiResponse,
    FixtureProvider,
    HttpProvider,
    IngestionError,
    RecordingProvider,
    SourceClientConfig,
    request_digest,
    write_fixture,
)

__all__ = [
    "ApiRequest",
    "ApiResponse",
    "EnrichmentReport",
    "EnrichmentResult",
    "FixtureProvider",
    "HttpProvider",
    "IngestionError",
    "RecordingProvider",
    "SourceClientConfig",
    "enrich_dataset",
    "enrich_ecosystem_timestamps",
    "enrich_gra_timestamp",
    "enrich_nvd_timestamp",
    "enrich_patched_at",
    "enrich_social",
    "fetch_global_advisories",
    "parse_global_advisory",
    "request_digest",
    "write_fixture",
]
