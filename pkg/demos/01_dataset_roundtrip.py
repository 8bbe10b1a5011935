"""Build a synthetic advisory dataset, persist it, and load it back.

The store is line-oriented JSON: one advisory per line, timestamps in
RFC 3339 UTC at seconds precision. Loading validates every line and reports
bad ones with their line number instead of dropping them silently.
"""

import json
import tempfile
from pathlib import Path

from advisoryflow import load_dataset, save_dataset, normalize_repo_url
from advisoryflow.store import write_validation_report
from advisoryflow.synth import random_records

workdir = Path(tempfile.mkdtemp(prefix="advisoryflow-demo-"))
dataset = workdir / "advisories.jsonl"

records = random_records(200, seed=1)
save_dataset(records, dataset)
print(f"wrote {len(records)} records to {dataset}")

result = load_dataset(dataset)
print(f"loaded {len(result.records)} records, {len(result.failures)} failures")
assert result.records == records

# damage one line and watch validation catch it
lines = dataset.read_text().splitlines()
broken = json.loads(lines[3])
broken["reviewed"] = not broken["reviewed"]
lines[3] = json.dumps(broken)
dataset.write_text("\n".join(lines) + "\n")

result = load_dataset(dataset)
print(f"after damaging line 4: {len(result.records)} records, "
      f"{len(result.failures)} failure(s)")
print("  reason:", result.failures[0].reason)
write_validation_report(result.failures, workdir / "validation_report.tsv")
print("  report:", (workdir / "validation_report.tsv").read_text().strip())

# repository URL normalization used throughout ingestion
for raw in ("https://github.com/Acme/lib/", "github.com/acme/lib.git",
            "https://gitlab.com/a/b"):
    print(f"normalize_repo_url({raw!r}) = {normalize_repo_url(raw)!r}")
