"""Cross-platform propagation of advisories.

Each reviewed advisory yields a date-ordered sequence of publication events
across the platforms that carry it. Consecutive distinct-date pairs become
directed flow tuples; same-day publications are simultaneous and contribute
no tuple between themselves, but each member pairs with the platforms of the
neighboring date groups. Aggregated tuples feed a three-level Sankey layout:
the first transition of a sequence sits between levels 1 and 2, every later
transition between levels 2 and 3.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass
from datetime import date
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .records import AdvisoryRecord, classify_source


class Platform(str, Enum):
    ghsa = "ghsa"
    gra = "gra"
    nvd = "nvd"
    friendsofphp = "friendsofphp"
    rustsec = "rustsec"
    pypa = "pypa"
    rubysec = "rubysec"
    govulndb = "govulndb"


@dataclass(frozen=True)
class PlatformEvent:
    platform: Platform
    date: date


@dataclass(frozen=True)
class FlowTuple:
    from_platform: Platform
    to_platform: Platform
    level: int  # 1 = first transition, 2 = any later one


@dataclass(frozen=True)
class SankeyLink:
    level: int
    source: Platform
    target: Platform
    weight: int


def event_sequence(record: AdvisoryRecord) -> list[PlatformEvent]:
    """Publication events of one advisory, sorted by UTC calendar day.

    Meaningful for reviewed records. Ties keep both events on the same date
    slot; the secondary platform-name ordering only makes output
    deterministic.
    """
    events = []
    if record.published_at is not None:
        events.append(PlatformEvent(Platform.ghsa, record.published_at.date()))
    if record.gra_published_at is not None:
        events.append(PlatformEvent(Platform.gra, record.gra_published_at.date()))
    if record.nvd_published_at is not None:
        events.append(PlatformEvent(Platform.nvd, record.nvd_published_at.date()))
    for db, ts in record.ecosystem_published_at.items():
        events.append(PlatformEvent(Platform(db.value), ts.date()))
    events.sort(key=lambda e: (e.date, e.platform.value))
    return events


def flow_tuples(sequence: Sequence[PlatformEvent]) -> Counter:
    """Multiset of flow tuples from a date-sorted event sequence.

    Platforms are grouped by date; every platform of one group pairs with
    every platform of the next group. Level numbering caps at 2 so chains
    longer than three date groups still map onto the three-level diagram.
    """
    groups: list[tuple[date, list[Platform]]] = []
    for event in sequence:
        if groups and groups[-1][0] == event.date:
            groups[-1][1].append(event.platform)
        else:
            groups.append((event.date, [event.platform]))
    tuples: Counter = Counter()
    for pos, ((_, current), (_, following)) in enumerate(zip(groups, groups[1:])):
        level = 1 if pos == 0 else 2
        for src in current:
            for dst in following:
                tuples[FlowTuple(src, dst, level)] += 1
    return tuples


def _qualifies(sequence: Sequence[PlatformEvent]) -> bool:
    # Published in GHSA and in at least one other platform on a distinct date.
    ghsa_dates = {e.date for e in sequence if e.platform is Platform.ghsa}
    if not ghsa_dates:
        return False
    return any(
        e.platform is not Platform.ghsa and e.date not in ghsa_dates
        for e in sequence
    )


def build_sankey(records: Iterable[AdvisoryRecord]) -> list[SankeyLink]:
    """Aggregate flow tuples of qualifying reviewed advisories into weighted
    links, sorted by (level, source, target)."""
    totals: Counter = Counter()
    for record in records:
        if not record.reviewed:
            continue
        sequence = event_sequence(record)
        if not _qualifies(sequence):
            continue
        totals.update(flow_tuples(sequence))
    links = [
        SankeyLink(level=t.level, source=t.from_platform, target=t.to_platform,
                   weight=count)
        for t, count in totals.items()
    ]
    links.sort(key=lambda l: (l.level, l.source.value, l.target.value))
    return links


def platform_origin_share(links: Sequence[SankeyLink], platform: Platform) -> float:
    """Of all flow traversing a platform, the fraction that originates there."""
    outbound = sum(l.weight for l in links if l.source is platform)
    inbound = sum(l.weight for l in links if l.target is platform)
    if outbound + inbound == 0:
        raise ValueError(f"no flow traverses {platform.value}")
    return outbound / (outbound + inbound)


def reviews_per_month(
    records: Iterable[AdvisoryRecord],
) -> dict[tuple[str, str], int]:
    """Count of reviewed advisories keyed by (review month YYYY-MM, source)."""
    counts: Counter = Counter()
    for record in records:
        if record.github_reviewed_at is None:
            continue
        month = record.github_reviewed_at.strftime("%Y-%m")
        counts[(month, classify_source(record).value)] += 1
    return dict(sorted(counts.items()))


def source_share(records: Iterable[AdvisoryRecord], source_value: str) -> float:
    """Share of reviewed advisories classified under the given source."""
    totals = Counter()
    for record in records:
        if record.github_reviewed_at is None:
            continue
        totals[classify_source(record).value] += 1
    total = sum(totals.values())
    if total == 0:
        raise ValueError("no reviewed records")
    return totals.get(source_value, 0) / total


def sequence_rows(records: Iterable[AdvisoryRecord]) -> list[tuple[str, str]]:
    """Full event chains as (ghsa_id, chain) rows; side output preserving
    sequences longer than the three diagram levels."""
    rows = []
    for record in records:
        if not record.reviewed:
            continue
        sequence = event_sequence(record)
        if not sequence:
            continue
        chain = ">".join(f"{e.platform.value}@{e.date.isoformat()}" for e in sequence)
        rows.append((record.ghsa_id, chain))
    rows.sort()
    return rows


def write_sankey_csv(links: Sequence[SankeyLink], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["level", "from", "to", "weight"])
        for link in links:
            writer.writerow([link.level, link.source.value, link.target.value, link.weight])


def sankey_json(links: Sequence[SankeyLink]) -> dict:
    """Node/link document for standard Sankey renderers; nodes are
    level-qualified so the three columns stay separate."""
    nodes: dict[str, dict] = {}
    out_links = []
    for link in links:
        src = f"{link.level}:{link.source.value}"
        dst = f"{link.level + 1}:{link.target.value}"
        nodes.setdefault(src, {"id": src, "level": link.level,
                               "platform": link.source.value})
        nodes.setdefault(dst, {"id": dst, "level": link.level + 1,
                               "platform": link.target.value})
        out_links.append({"source": src, "target": dst, "value": link.weight})
    return {
        "nodes": [nodes[key] for key in sorted(nodes)],
        "links": out_links,
    }


def write_sankey_json(links: Sequence[SankeyLink], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        json.dump(sankey_json(links), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_monthly_csv(table: dict[tuple[str, str], int], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["month", "source", "count"])
        for (month, source), count in table.items():
            writer.writerow([month, source, count])


def write_sequences_csv(rows: Sequence[tuple[str, str]], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["ghsa_id", "chain"])
        writer.writerows(rows)
