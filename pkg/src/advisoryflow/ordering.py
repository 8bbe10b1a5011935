"""FIFO-order diagnostics for the review pipeline.

An advisory arrives when its patch is released and leaves when it is
reviewed. Pairing arrival ranks with review ranks gives a permutation whose
longest increasing subsequence measures how FIFO-like the pipeline is: a
uniformly random permutation of size n has an expected LIS fraction of about
2/sqrt(n), so anything far above that indicates order preservation.
"""

from __future__ import annotations

import csv
import math
from bisect import bisect_left
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Iterable, Sequence

from .records import AdvisoryRecord, AdvisorySource, classify_source


@dataclass(frozen=True)
class OrderStats:
    n: int
    lis_length: int
    lis_fraction: float
    baseline_fraction: float


@dataclass(frozen=True)
class OrderSample:
    ghsa_id: str
    arrival: datetime
    review: datetime
    source: AdvisorySource


def rank_pairs(samples: Sequence[tuple], ids: Sequence | None = None) -> list[int]:
    """Map (arrival_time, review_time) pairs to a review-rank permutation.

    Element i of the result is the 1-based review rank of the i-th arrival.
    Ties in either time are broken by the corresponding entry of ``ids``
    (positional index by default), which keeps the permutation deterministic.
    """
    n = len(samples)
    keys = list(ids) if ids is not None else list(range(n))
    if len(keys) != n:
        raise ValueError("ids must match samples in length")
    arrival_order = sorted(range(n), key=lambda i: (samples[i][0], keys[i]))
    review_order = sorted(range(n), key=lambda i: (samples[i][1], keys[i]))
    review_rank = [0] * n
    for rank, idx in enumerate(review_order, start=1):
        review_rank[idx] = rank
    return [review_rank[idx] for idx in arrival_order]


def lis_length(perm: Sequence[int]) -> int:
    """Length of the longest strictly increasing subsequence.

    Patience sorting with binary search, O(n log n).
    """
    tails: list[int] = []
    for value in perm:
        pos = bisect_left(tails, value)
        if pos == len(tails):
            tails.append(value)
        else:
            tails[pos] = value
    return len(tails)


def fifo_assessment(perm: Sequence[int]) -> OrderStats:
    """LIS length and fraction next to the 2/sqrt(n) random baseline."""
    n = len(perm)
    if n < 1:
        raise ValueError("empty permutation")
    length = lis_length(perm)
    return OrderStats(
        n=n,
        lis_length=length,
        lis_fraction=length / n,
        baseline_fraction=2.0 / math.sqrt(n),
    )


def review_order_samples(
    records: Iterable[AdvisoryRecord],
    cutoff: datetime | None = None,
) -> list[OrderSample]:
    """Arrival/review pairs for the order analysis.

    Arrival is the patch release; records without both timestamps, with a
    review earlier than the patch, or published before ``cutoff`` (GRA date
    when linked, else GHSA date) are skipped.
    """
    out = []
    for record in records:
        if record.patched_at is None or record.github_reviewed_at is None:
            continue
        if record.github_reviewed_at < record.patched_at:
            continue
        if cutoff is not None:
            published = record.gra_published_at or record.published_at
            if published is None or published < cutoff:
                continue
        out.append(OrderSample(
            ghsa_id=record.ghsa_id,
            arrival=record.patched_at,
            review=record.github_reviewed_at,
            source=classify_source(record),
        ))
    return out


def scatter_rows(samples: Sequence[OrderSample]) -> list[tuple[int, int, str]]:
    """(arrival_rank, review_rank, source) triples, arrival-rank ordered."""
    pairs = [(s.arrival, s.review) for s in samples]
    ids = [s.ghsa_id for s in samples]
    perm = rank_pairs(pairs, ids)
    arrival_order = sorted(range(len(samples)),
                           key=lambda i: (samples[i].arrival, samples[i].ghsa_id))
    return [
        (rank, perm[rank - 1], samples[idx].source.value)
        for rank, idx in enumerate(arrival_order, start=1)
    ]


def write_scatter_csv(rows: Iterable[tuple[int, int, str]], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["arrival_rank", "review_rank", "source"])
        writer.writerows(rows)
