"""Toolkit for mining security advisories and analyzing their review pipeline:
ingestion with fixture replay, credit/flow/latency statistics, FIFO-order
diagnostics and a two-stage queueing model with simulation and what-if
analysis."""

from .records import (
    AdvisoryRecord,
    AdvisorySource,
    AffectedPackage,
    Credit,
    Ecosystem,
    EcosystemDb,
    POST_AUTOMATION_CUTOFF,
    RepoMetadata,
    Role,
    Severity,
    UserProfile,
    classify_source,
    normalize_repo_url,
    validate_record,
)
from .queueing import (
    QueueParams,
    SimTrace,
    estimate_params,
    mean_review_time,
    simulate,
    transition_summary,
    validate_against,
    what_if,
)
from .stats import (
    EcdfCurve,
    OutlierFence,
    RankTestResult,
    dagostino_k2,
    ecdf,
    iqr_fence,
    mann_whitney,
    percentile,
    welch_t_test,
)
from .store import load_dataset, save_dataset

__version__ = "0.1.0"

__all__ = [
    "AdvisoryRecord",
    "AdvisorySource",
    "AffectedPackage",
    "Credit",
    "EcdfCurve",
    "Ecosystem",
    "EcosystemDb",
    "OutlierFence",
    "POST_AUTOMATION_CUTOFF",
    "QueueParams",
    "RankTestResult",
    "RepoMetadata",
    "Role",
    "Severity",
    "SimTrace",
    "UserProfile",
    "classify_source",
    "dagostino_k2",
    "ecdf",
    "estimate_params",
    "iqr_fence",
    "load_dataset",
    "mann_whitney",
    "mean_review_time",
    "normalize_repo_url",
    "percentile",
    "save_dataset",
    "simulate",
    "transition_summary",
    "validate_against",
    "validate_record",
    "welch_t_test",
    "what_if",
]
