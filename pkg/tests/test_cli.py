import csv
import json
from pathlib import Path

import pytest

from advisoryflow.cli import main
from advisoryflow.queueing import QueueParams, simulate, write_params
from advisoryflow.store import load_dataset, save_dataset
from advisoryflow.synth import (
    build_ingestion_world,
    day,
    make_ghsa_id,
    traces_to_records,
)
from advisoryflow.records import AdvisoryRecord

REFERENCE = QueueParams(3.413, 3.433, 0.006, 0.474)
MILD = QueueParams(3.413, 3.6, 0.006, 0.474)


def tree_bytes(root: Path) -> dict:
    return {
        str(path.relative_to(root)): path.read_bytes()
        for path in sorted(root.rglob("*")) if path.is_file()
    }


@pytest.fixture()
def world_dir(tmp_path):
    fixtures = tmp_path / "fixtures"
    build_ingestion_world(fixtures)
    return fixtures


class TestIngest:
    def test_fixture_run(self, world_dir, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(["ingest", "--fixtures", str(world_dir), "--out", str(out)])
        assert code == 0
        assert (out / "dataset.jsonl").exists()
        assert (out / "profiles.jsonl").exists()
        assert (out / "repos.jsonl").exists()
        result = load_dataset(out / "dataset.jsonl")
        assert result.failures == []
        summary = capsys.readouterr().err
        assert f"ingested {len(result.records)}" in summary

    def test_rerun_is_idempotent(self, world_dir, tmp_path):
        out = tmp_path / "out"
        main(["ingest", "--fixtures", str(world_dir), "--out", str(out)])
        first = (out / "dataset.jsonl").read_bytes()
        main(["ingest", "--fixtures", str(world_dir), "--out", str(out)])
        assert (out / "dataset.jsonl").read_bytes() == first

    def test_live_mode_without_token_names_variable(self, tmp_path, monkeypatch, capsys):
        monkeypatch.delenv("GITHUB_TOKEN", raising=False)
        code = main(["ingest", "--out", str(tmp_path / "out")])
        assert code != 0
        assert "GITHUB_TOKEN" in capsys.readouterr().err


@pytest.fixture()
def world_dataset(world_dir, tmp_path):
    out = tmp_path / "ingested"
    assert main(["ingest", "--fixtures", str(world_dir), "--out", str(out)]) == 0
    return out


class TestAnalyze:
    def test_latency_tables(self, world_dataset, tmp_path):
        out = tmp_path / "latency"
        code = main(["analyze", "latency", "--dataset",
                     str(world_dataset / "dataset.jsonl"), "--out", str(out)])
        assert code == 0
        with (out / "time_to_review_percentiles_all.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        assert {"source", "P25", "P50", "P99"} <= set(rows[0])
        assert (out / "comparisons.json").exists()

    def test_order_identity_fixture(self, tmp_path, capsys):
        records = [
            AdvisoryRecord(ghsa_id=make_ghsa_id(i), published_at=day(i),
                           patched_at=day(i), github_reviewed_at=day(i + 0.5),
                           reviewed=True)
            for i in range(20)
        ]
        dataset = tmp_path / "identity.jsonl"
        save_dataset(records, dataset)
        out = tmp_path / "order"
        code = main(["analyze", "order", "--dataset", str(dataset), "--out", str(out)])
        assert code == 0
        stats = json.loads((out / "order_stats.json").read_text())
        assert stats["lis_fraction"] == 1.0
        assert "lis_fraction=1.0000" in capsys.readouterr().err

    def test_flow_on_empty_dataset(self, tmp_path):
        dataset = tmp_path / "empty.jsonl"
        dataset.write_text("")
        out = tmp_path / "flow"
        code = main(["analyze", "flow", "--dataset", str(dataset), "--out", str(out)])
        assert code == 0
        assert (out / "sankey_links.csv").read_text().strip() == "level,from,to,weight"

    def test_roles_with_side_tables(self, world_dataset, tmp_path):
        out = tmp_path / "roles"
        code = main([
            "analyze", "roles",
            "--dataset", str(world_dataset / "dataset.jsonl"),
            "--profiles", str(world_dataset / "profiles.jsonl"),
            "--repos", str(world_dataset / "repos.jsonl"),
            "--out", str(out),
        ])
        assert code == 0
        assert (out / "role_frequencies.csv").exists()
        assert (out / "popularity_by_role.csv").exists()
        assert (out / "repo_group_tests.json").exists()

    def test_missing_dataset_fails(self, tmp_path, capsys):
        code = main(["analyze", "roles", "--dataset",
                     str(tmp_path / "absent.jsonl"), "--out", str(tmp_path / "o")])
        assert code != 0
        assert "error" in capsys.readouterr().err


class TestQueueCommands:
    def test_whatif_reference_values(self, tmp_path):
        params_file = tmp_path / "params.txt"
        write_params(REFERENCE, params_file)
        out = tmp_path / "out"
        code = main(["whatif", "--params", str(params_file),
                     "--p-list", "0.474,0.10", "--out", str(out)])
        assert code == 0
        with (out / "whatif.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        values = [float(row["mean_review_time_days"]) for row in rows]
        assert values[0] == pytest.approx(129.0, abs=0.5)
        assert values[1] == pytest.approx(66.7, abs=0.2)

    def test_simulate_rejects_zero_arrivals(self, tmp_path):
        params_file = tmp_path / "params.txt"
        write_params(MILD, params_file)
        with pytest.raises(SystemExit) as err:
            main(["simulate", "--params", str(params_file), "--n", "0",
                  "--out", str(tmp_path / "out")])
        assert err.value.code == 2

    def test_simulate_writes_scatter_schema(self, tmp_path):
        params_file = tmp_path / "params.txt"
        write_params(MILD, params_file)
        out = tmp_path / "out"
        code = main(["simulate", "--params", str(params_file), "--n", "200",
                     "--seed", "3", "--out", str(out)])
        assert code == 0
        with (out / "sim_scatter.csv").open() as fh:
            header = fh.readline().strip()
        assert header == "arrival_rank,review_rank,source"

    def test_fit_simulate_validate_round_trip(self, tmp_path):
        records = traces_to_records(simulate(MILD, 3000, seed=1))
        dataset = tmp_path / "sim.jsonl"
        save_dataset(records, dataset)
        out = tmp_path / "out"
        assert main(["fit", "--dataset", str(dataset), "--out", str(out)]) == 0
        assert main(["validate", "--dataset", str(dataset),
                     "--params", str(out / "params.txt"),
                     "--seed", "2", "--out", str(out)]) == 0
        validation = json.loads((out / "validation.json").read_text())
        assert validation["p_value"] > 0.05

    def test_fit_failure_diagnostic(self, tmp_path, capsys):
        dataset = tmp_path / "tiny.jsonl"
        save_dataset([AdvisoryRecord(ghsa_id=make_ghsa_id(0))], dataset)
        code = main(["fit", "--dataset", str(dataset), "--out", str(tmp_path / "o")])
        assert code != 0
        assert "patch" in capsys.readouterr().err


class TestReport:
    def test_two_runs_byte_identical(self, world_dir, tmp_path):
        out1, out2 = tmp_path / "run1", tmp_path / "run2"
        assert main(["report", "--fixtures", str(world_dir), "--out", str(out1),
                     "--seed", "7"]) == 0
        assert main(["report", "--fixtures", str(world_dir), "--out", str(out2),
                     "--seed", "7"]) == 0
        first, second = tree_bytes(out1), tree_bytes(out2)
        assert first.keys() == second.keys()
        assert first == second

    def test_report_layout(self, world_dir, tmp_path):
        out = tmp_path / "report"
        assert main(["report", "--fixtures", str(world_dir), "--out", str(out),
                     "--seed", "7"]) == 0
        for expected in (
            "dataset.jsonl",
            "roles/role_frequencies.csv",
            "flow/sankey_links.csv",
            "latency/comparisons.json",
            "order/scatter.csv",
            "queue/params.txt",
            "queue/transition_summary.json",
            "queue/whatif.csv",
            "queue/validation.json",
        ):
            assert (out / expected).exists(), expected

    def test_config_file_with_flag_override(self, world_dir, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({
            "fixtures": str(world_dir),
            "out": str(tmp_path / "ignored"),
            "seed": 7,
        }))
        out = tmp_path / "chosen"
        assert main(["report", "--config", str(config), "--out", str(out)]) == 0
        assert (out / "dataset.jsonl").exists()
        assert not (tmp_path / "ignored").exists()
