"""Command-line pipeline: ingest, analyze, fit, simulate, whatif, validate
and report. Data goes to files under the output directory; human-readable
summaries go to standard error. Every command is deterministic given the
dataset, configuration and seed."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

from . import credits as credits_mod
from . import flows, latency, ordering, queueing
from .ingestion import (
    FixtureProvider,
    HttpProvider,
    IngestionError,
    SourceClientConfig,
    enrich_dataset,
    fetch_global_advisories,
)
from .records import POST_AUTOMATION_CUTOFF, AdvisorySource
from .store import (
    DatasetError,
    load_dataset,
    load_profiles,
    load_repo_metadata,
    parse_timestamp,
    save_dataset,
    save_profiles,
    save_repo_metadata,
    write_validation_report,
)

DEFAULT_PROVIDERS = {
    "github": {"base_url": "https://api.github.com", "auth_token_env_var": "GITHUB_TOKEN"},
    "nvd": {"base_url": "https://services.nvd.nist.gov/rest/json", "auth_token_env_var": "NVD_API_KEY"},
    "depsdev": {"base_url": "https://api.deps.dev", "auth_token_env_var": None},
    "history": {"base_url": "https://history.invalid", "auth_token_env_var": None},
}


@dataclass
class RunConfig:
    dataset_path: Path | None = None
    fixture_dir: Path | None = None
    output_dir: Path = Path("out")
    cutoff: datetime = POST_AUTOMATION_CUTOFF
    seed: int = 0
    providers: dict[str, SourceClientConfig] = field(default_factory=dict)


def _load_config(args) -> RunConfig:
    settings: dict = {}
    if getattr(args, "config", None):
        settings = json.loads(Path(args.config).read_text(encoding="utf-8"))
    provider_settings = {**DEFAULT_PROVIDERS, **settings.get("providers", {})}
    providers = {
        name: SourceClientConfig(**cfg) for name, cfg in provider_settings.items()
    }

    def pick(flag_name, key, default=None):
        flag = getattr(args, flag_name, None)
        if flag is not None:
            return flag
        return settings.get(key, default)

    cutoff_raw = pick("cutoff", "cutoff")
    cutoff = parse_timestamp(cutoff_raw) if cutoff_raw else POST_AUTOMATION_CUTOFF
    dataset = pick("dataset", "dataset")
    fixtures = pick("fixtures", "fixtures")
    out = pick("out", "out", "out")
    return RunConfig(
        dataset_path=Path(dataset) if dataset else None,
        fixture_dir=Path(fixtures) if fixtures else None,
        output_dir=Path(out),
        cutoff=cutoff,
        seed=int(pick("seed", "seed", 0) or 0),
        providers=providers,
    )


def _provider(config: RunConfig):
    if config.fixture_dir is not None:
        return FixtureProvider(config.fixture_dir)
    return HttpProvider(config.providers)


def _say(message: str) -> None:
    print(message, file=sys.stderr)


def _write_json(payload, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_records(config: RunConfig):
    if config.dataset_path is None:
        raise DatasetError("no dataset given; pass --dataset or configure one")
    result = load_dataset(config.dataset_path)
    if result.failures:
        report = config.output_dir / "validation_report.tsv"
        config.output_dir.mkdir(parents=True, exist_ok=True)
        write_validation_report(result.failures, report)
        _say(f"{len(result.failures)} invalid line(s); reasons in {report}")
    return result.records


# --- commands ----------------------------------------------------------------

def cmd_ingest(args) -> int:
    config = _load_config(args)
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    provider = _provider(config)
    since = parse_timestamp(args.since) if args.since else None
    records = fetch_global_advisories(provider, since=since)
    result = enrich_dataset(records, provider)
    dataset_path = config.dataset_path or (out / "dataset.jsonl")
    save_dataset(result.records, dataset_path)
    save_profiles(result.profiles, out / "profiles.jsonl")
    save_repo_metadata(result.repos, out / "repos.jsonl")
    _write_json(result.report.to_json_dict(), out / "enrichment_report.json")
    reviewed = sum(1 for r in result.records if r.reviewed)
    _say(f"ingested {len(result.records)} advisories "
         f"({reviewed} reviewed, {len(result.records) - reviewed} unreviewed) "
         f"-> {dataset_path}")
    return 0


def _analyze_roles(records, config: RunConfig, out: Path, profiles, repos) -> None:
    out.mkdir(parents=True, exist_ok=True)
    counts = credits_mod.role_frequencies(records)
    credits_mod.write_role_frequencies_csv(counts, out / "role_frequencies.csv")
    rows = credits_mod.specialization_table(records)
    credits_mod.write_specialization_csv(rows, out / "specialization.csv")
    events = credits_mod.reviewer_experience(records, cutoff=config.cutoff)
    for name, keep in (("all", None), ("gra", True), ("non_gra", False)):
        values = [float(e.prior_review_count) for e in events
                  if keep is None or e.is_gra is keep]
        if values:
            credits_mod.write_experience_ecdf_csv(
                values, out / f"reviewer_experience_ecdf_{name}.csv")
    if profiles:
        popularity = credits_mod.popularity_by_role(records, profiles)
        credits_mod.write_popularity_csv(popularity, out / "popularity_by_role.csv")
    if repos:
        comparisons = []
        for metric in ("stars", "open_issues", "security_policy_score", "maintained_score"):
            try:
                result = credits_mod.compare_repo_groups(repos, metric)
            except ValueError:
                continue
            comparisons.append(latency.comparison_json(
                f"repo_{metric}", "gra_linked", "non_gra_linked", result))
        payload: dict = {"comparisons": comparisons}
        try:
            gra_share, non_share = credits_mod.policy_share(repos)
            payload["policy_share"] = {"gra_linked": gra_share,
                                       "non_gra_linked": non_share}
        except ValueError:
            pass
        _write_json(payload, out / "repo_group_tests.json")
    total = sum(counts.values())
    _say(f"roles: {total} credit occurrences, {len(events)} reviewer events")


def _analyze_flow(records, config: RunConfig, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    links = flows.build_sankey(records)
    flows.write_sankey_csv(links, out / "sankey_links.csv")
    flows.write_sankey_json(links, out / "sankey.json")
    table = flows.reviews_per_month(records)
    flows.write_monthly_csv(table, out / "reviews_per_month.csv")
    flows.write_sequences_csv(flows.sequence_rows(records), out / "sequences.csv")
    summary = f"flow: {len(links)} links, {sum(table.values())} reviews"
    try:
        share = flows.platform_origin_share(links, flows.Platform.gra)
        summary += f", GRA-origin share {share:.1%}"
    except ValueError:
        pass
    _say(summary)


def _analyze_latency(records, config: RunConfig, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    window = (config.cutoff, None)
    comparisons = []
    shares = {}
    for kind, stem in ((latency.LagKind.time_to_review, "time_to_review"),
                       (latency.LagKind.patch_to_review, "patch_to_review")):
        samples = latency.collect_samples(records, kind)
        if not samples:
            continue
        recent = latency.filter_window(samples, *window)
        for label, pool in (("all", samples), ("post_cutoff", recent)):
            groups = [g for g in ("gra", "nvd", "other", "all")
                      if g == "all" or any(s.source.value == g for s in pool)]
            if not pool:
                continue
            table = latency.percentile_table(pool, groups=groups)
            latency.write_percentile_csv(
                table, out / f"{stem}_percentiles_{label}.csv")
            medians = " ".join(f"{g}={table[g][50]:.2f}d" for g in groups)
            _say(f"latency {stem} {label} medians: {medians} (n={len(pool)})")
        latency.write_monthly_median_csv(
            latency.monthly_median_lag(samples), out / f"{stem}_monthly_median.csv")
        for label, win in (("all", None), ("post_cutoff", window)):
            try:
                result = latency.compare_sources(
                    samples, AdvisorySource.gra, AdvisorySource.nvd, window=win)
            except ValueError:
                continue
            record = latency.comparison_json(f"{stem}_{label}", "gra", "nvd", result)
            comparisons.append(record)
            _say(f"latency {stem} {label}: rbc={result.rbc:.3f} "
                 f"p={result.p_value:.2g} (n={result.n1}/{result.n2})")
        for source in (AdvisorySource.gra, AdvisorySource.nvd):
            try:
                shares[f"{stem}_{source.value}_within_5d"] = latency.share_within(
                    recent, source, 5.0)
            except ValueError:
                continue
    if comparisons:
        latency.write_comparisons_json(comparisons, out / "comparisons.json")
    if shares:
        _write_json(shares, out / "share_within.json")


def _analyze_order(records, config: RunConfig, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    samples = ordering.review_order_samples(records, cutoff=config.cutoff)
    rows = ordering.scatter_rows(samples)
    ordering.write_scatter_csv(rows, out / "scatter.csv")
    if rows:
        perm = [review for _, review, _ in sorted(rows)]
        stats = ordering.fifo_assessment(perm)
        _write_json({
            "n": stats.n,
            "lis_length": stats.lis_length,
            "lis_fraction": stats.lis_fraction,
            "baseline_fraction": stats.baseline_fraction,
        }, out / "order_stats.json")
        _say(f"order: lis_fraction={stats.lis_fraction:.4f} "
             f"baseline={stats.baseline_fraction:.4f} (n={stats.n})")
    else:
        _write_json({"n": 0}, out / "order_stats.json")
        _say("order: no usable samples")


def cmd_analyze(args) -> int:
    config = _load_config(args)
    records = _load_records(config)
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    profiles = repos = None
    if args.which == "roles":
        profiles_path = Path(args.profiles) if args.profiles else None
        repos_path = Path(args.repos) if args.repos else None
        if profiles_path and profiles_path.exists():
            profiles = load_profiles(profiles_path)
        if repos_path and repos_path.exists():
            repos = load_repo_metadata(repos_path)
        _analyze_roles(records, config, out, profiles, repos)
    elif args.which == "flow":
        _analyze_flow(records, config, out)
    elif args.which == "latency":
        _analyze_latency(records, config, out)
    elif args.which == "order":
        _analyze_order(records, config, out)
    return 0


def cmd_fit(args) -> int:
    config = _load_config(args)
    records = _load_records(config)
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    params = queueing.estimate_params(records, lambda_method=args.lambda_method)
    path = Path(args.params) if args.params else out / "params.txt"
    queueing.write_params(params, path)
    _say(f"fit: lambda={params.arrival_rate:.4f} mu1={params.review_rate:.4f} "
         f"mu2={params.nvd_exit_rate} p={params.nvd_first_prob:.4f} -> {path}")
    return 0


def cmd_simulate(args) -> int:
    config = _load_config(args)
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    params = queueing.read_params(Path(args.params))
    traces = queueing.simulate(params, args.n, seed=config.seed)
    ordering.write_scatter_csv(queueing.sim_scatter_rows(traces), out / "sim_scatter.csv")
    _write_trace_csv(traces, out / "sim_trace.csv")
    mean = sum(t.review_end - t.arrival_time for t in traces) / len(traces)
    _say(f"simulate: n={args.n} seed={config.seed} mean review time {mean:.2f} days "
         f"(analytic {queueing.mean_review_time(params):.2f})")
    return 0


def _write_trace_csv(traces, path: Path) -> None:
    import csv

    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["arrival_time", "path", "stage2_exit_time",
                         "review_start", "review_end", "arrival_rank", "review_rank"])
        for t in traces:
            writer.writerow([
                repr(t.arrival_time), t.path.value,
                "" if t.stage2_exit_time is None else repr(t.stage2_exit_time),
                repr(t.review_start), repr(t.review_end),
                t.arrival_rank, t.review_rank,
            ])


def cmd_whatif(args) -> int:
    config = _load_config(args)
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    params = queueing.read_params(Path(args.params))
    p_values = [float(v) for v in args.p_list.split(",") if v.strip() != ""]
    table = queueing.what_if(params, p_values)
    import csv

    with (out / "whatif.csv").open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["p", "mean_review_time_days"])
        for p, days in table:
            writer.writerow([repr(p), repr(days)])
    for p, days in table:
        _say(f"whatif: p={p:g} -> {days:.1f} days")
    return 0


def cmd_validate(args) -> int:
    config = _load_config(args)
    records = _load_records(config)
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    params = queueing.read_params(Path(args.params))
    samples = ordering.review_order_samples(records, cutoff=config.cutoff)
    rows = ordering.scatter_rows(samples)
    real = [(arrival, review) for arrival, review, _ in rows]
    if not real:
        raise DatasetError("no usable arrival/review pairs after filtering")
    traces = queueing.simulate(params, len(real), seed=config.seed)
    statistic, p_value = queueing.validate_against(real, traces)
    _write_json({
        "n_real": len(real),
        "n_sim": len(traces),
        "statistic": statistic,
        "p_value": p_value,
    }, out / "validation.json")
    _say(f"validate: t={statistic:.3f} p={p_value:.3f} over n={len(real)}")
    return 0


def cmd_report(args) -> int:
    config = _load_config(args)
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)

    if config.fixture_dir is not None:
        provider = FixtureProvider(config.fixture_dir)
        records = fetch_global_advisories(provider)
        result = enrich_dataset(records, provider)
        records = result.records
        profiles, repos = result.profiles, result.repos
        save_dataset(records, out / "dataset.jsonl")
        save_profiles(profiles, out / "profiles.jsonl")
        save_repo_metadata(repos, out / "repos.jsonl")
        _write_json(result.report.to_json_dict(), out / "enrichment_report.json")
    else:
        records = _load_records(config)
        profiles = repos = None

    _analyze_roles(records, config, out / "roles", profiles, repos)
    _analyze_flow(records, config, out / "flow")
    _analyze_latency(records, config, out / "latency")
    _analyze_order(records, config, out / "order")

    queue_dir = out / "queue"
    queue_dir.mkdir(parents=True, exist_ok=True)
    summary = queueing.transition_summary(records)
    _write_json({
        "edge_probabilities": {f"{s}->{t}": p
                               for (s, t), p in summary.edge_probabilities.items()},
        "edge_counts": {f"{s}->{t}": c for (s, t), c in summary.edge_counts.items()},
        "mean_dwell_days": summary.mean_dwell_days,
    }, queue_dir / "transition_summary.json")
    try:
        params = queueing.estimate_params(records)
    except queueing.ParameterFitError as exc:
        (queue_dir / "fit_skipped.txt").write_text(f"{exc}\n", encoding="utf-8")
        _say(f"report: queue fit skipped ({exc})")
        return 0
    queueing.write_params(params, queue_dir / "params.txt")
    samples = ordering.review_order_samples(records, cutoff=config.cutoff)
    rows = ordering.scatter_rows(samples)
    real = [(arrival, review) for arrival, review, _ in rows]
    n_sim = args.sim_n or max(len(real), 1)
    traces = queueing.simulate(params, n_sim, seed=config.seed)
    ordering.write_scatter_csv(queueing.sim_scatter_rows(traces),
                               queue_dir / "sim_scatter.csv")
    if real:
        statistic, p_value = queueing.validate_against(real, traces)
        _write_json({"n_real": len(real), "n_sim": n_sim,
                     "statistic": statistic, "p_value": p_value},
                    queue_dir / "validation.json")
    sweep = queueing.what_if(params, [round(0.1 * i, 1) for i in range(11)])
    import csv

    with (queue_dir / "whatif.csv").open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["p", "mean_review_time_days"])
        for p, days in sweep:
            writer.writerow([repr(p), repr(days)])
    _say(f"report: complete under {out}")
    return 0


# --- argument parsing ---------------------------------------------------------

def _positive_int(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return number


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="advisoryflow",
        description="Security-advisory review pipeline analytics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--dataset", help="advisory dataset (JSONL)")
        p.add_argument("--fixtures", help="fixture directory for offline replay")
        p.add_argument("--out", help="output directory (default: out)")
        p.add_argument("--cutoff", help="post-automation cutoff (RFC 3339)")
        p.add_argument("--seed", type=int, help="random seed")

    p = sub.add_parser("ingest", help="fetch and enrich advisories")
    common(p)
    p.add_argument("--since", help="only advisories published at or after this time")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("analyze", help="run one analysis over a dataset")
    p.add_argument("which", choices=["roles", "flow", "latency", "order"])
    common(p)
    p.add_argument("--profiles", help="user profiles JSONL (roles analysis)")
    p.add_argument("--repos", help="repository metadata JSONL (roles analysis)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("fit", help="estimate queue parameters from a dataset")
    common(p)
    p.add_argument("--params", help="where to write the params file")
    p.add_argument("--lambda-method", choices=["date_window", "gap_trim"],
                   default="date_window")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="simulate the two-stage review network")
    common(p)
    p.add_argument("--params", required=True, help="params file from fit")
    p.add_argument("--n", type=_positive_int, required=True, help="number of arrivals")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("whatif", help="sweep the NVD-first fraction")
    common(p)
    p.add_argument("--params", required=True, help="params file from fit")
    p.add_argument("--p-list", required=True, help="comma-separated p values")
    p.set_defaults(func=cmd_whatif)

    p = sub.add_parser("validate", help="compare simulated and real review order")
    common(p)
    p.add_argument("--params", required=True, help="params file from fit")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("report", help="run the full analysis pipeline")
    common(p)
    p.add_argument("--sim-n", type=_positive_int,
                   help="arrivals for the model comparison run")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DatasetError, IngestionError, queueing.ParameterFitError,
            queueing.InstabilityError, ValueError, OSError) as exc:
        _say(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
