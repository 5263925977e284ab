"""Command-line entry points.

Exit codes: 0 success, 1 lint warnings or failed validation checks,
2 input or parse failures, 64 usage errors.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import click

from . import __version__
from .abstraction import parse_construct
from .catalog import (
    FEATURES,
    Catalog,
    catalog_to_data,
    classify,
    default_catalog,
    extract_catalog,
    level_of,
    load_catalog,
    validate_catalog,
)
from .corpus import (
    corpus_stats,
    corpus_stats_to_dict,
    evolution_series,
    load_history_manifest,
    materialize_snapshots,
    month_range,
)
from .lint import RiskModel, default_risk_model, diagnostic_to_dict, evaluate, load_risk_model
from .metrics import WorkflowMetrics
from .model import discover_workflow_files
from .reliability import (
    SIZE_METRICS,
    ReliabilityMetrics,
    compare_groups,
    group_records,
    load_run_records,
    outcome_table,
    regress_features,
    regress_sizes,
    reliability_metrics,
)
from .scan import scan_file, scan_record
from .stats import mann_kendall


class InputError(click.ClickException):
    """A readable-but-bad input: maps to exit code 2."""

    exit_code = 2


def _emit_json(data: object) -> None:
    click.echo(json.dumps(data, sort_keys=True, indent=2))


def _load_catalog_arg(path: str | None) -> Catalog:
    if path is None:
        return default_catalog()
    try:
        return load_catalog(path)
    except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot load catalog {path}: {exc}") from exc


def _load_model_arg(path: str | None) -> RiskModel:
    if path is None:
        return default_risk_model()
    try:
        return load_risk_model(path)
    except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot load risk model {path}: {exc}") from exc


def _expand_paths(paths: tuple[str, ...]) -> list[str]:
    """Files stay as given; directories are searched for workflow files."""
    out: list[str] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            out.extend(str(f) for f in discover_workflow_files(p))
        else:
            out.append(raw)
    if not out:
        raise click.UsageError("no workflow files found under the given paths")
    return out


def _parse_instant_arg(text: str) -> datetime:
    value = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if value.tzinfo is None:
        value = value.replace(tzinfo=timezone.utc)
    return value.astimezone(timezone.utc)


def _parse_window(text: str) -> tuple[datetime, datetime]:
    parts = text.split("..")
    if len(parts) != 2:
        raise click.UsageError('window must look like "2023-01-01..2023-12-31"')
    try:
        start, end = (_parse_instant_arg(p) for p in parts)
    except ValueError as exc:
        raise click.UsageError(f"bad window instant: {exc}") from exc
    if end <= start:
        raise click.UsageError("window end must be after its start")
    return start, end


def _num(value: float | None) -> float | None:
    return None if value is None else round(value, 6)


catalog_option = click.option(
    "--catalog",
    "catalog_path",
    type=click.Path(),
    default=None,
    envvar="WFLENS_CATALOG",
    help="Construct catalog JSON (default: bundled catalog; env WFLENS_CATALOG).",
)


@click.group()
@click.version_option(__version__, prog_name="wflens")
def cli() -> None:
    """Analyze GitHub Actions workflow files."""


# ---------------------------------------------------------------- scan


def _scan_line(record: dict) -> str:
    if "error" in record:
        err = record["error"]
        where = ""
        if err.get("line") is not None:
            where = f" at line {err['line']}, column {err['column']}"
        return f"{record['file']}: parse error{where}: {err['message']}"
    unknown = record["unknown_constructs"]
    tail = f", unknown constructs: {len(unknown)}" if unknown else ""
    return (
        f"{record['file']}: paths={record['n_paths']} constructs={record['n_constructs']} "
        f"features={record['n_features']} ratio={record['path_construct_ratio']}{tail}"
    )


@cli.command()
@click.argument("paths", nargs=-1, required=True, type=click.Path())
@catalog_option
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["json", "jsonl", "text"]),
    default="json",
    show_default=True,
)
def scan(paths: tuple[str, ...], catalog_path: str | None, fmt: str) -> None:
    """Parse workflow files and report per-file size metrics."""
    catalog = _load_catalog_arg(catalog_path)
    files = _expand_paths(paths)
    results = [scan_file(f, catalog) for f in files]
    records = sorted((scan_record(r) for r in results), key=lambda r: r["file"])
    if fmt == "json":
        _emit_json(records)
    elif fmt == "jsonl":
        for record in records:
            click.echo(json.dumps(record, sort_keys=True))
    else:
        for record in records:
            click.echo(_scan_line(record))
    if any(not r.parsed for r in results):
        sys.exit(2)


# ---------------------------------------------------------------- lint


@cli.command()
@click.argument("paths", nargs=-1, required=True, type=click.Path())
@catalog_option
@click.option(
    "--model",
    "model_path",
    type=click.Path(),
    default=None,
    envvar="WFLENS_RISK_MODEL",
    help="Risk model JSON (default: bundled model; env WFLENS_RISK_MODEL).",
)
@click.option(
    "--format", "fmt", type=click.Choice(["json", "text"]), default="text", show_default=True
)
def lint(paths: tuple[str, ...], catalog_path: str | None, model_path: str | None, fmt: str) -> None:
    """Flag workflow traits associated with worse run outcomes."""
    catalog = _load_catalog_arg(catalog_path)
    model = _load_model_arg(model_path)
    files = _expand_paths(paths)

    parse_failed = False
    diagnostics = []
    risk: dict[str, dict] = {}
    for file in files:
        result = scan_file(file, catalog)
        if not result.parsed:
            parse_failed = True
            click.echo(f"{file}: {result.error}", err=True)
            continue
        assert result.metrics is not None
        diags, summary = evaluate(result.metrics, model, file=file)
        diagnostics.extend(diags)
        risk[file] = {
            "relative_failure_odds": round(summary.relative_failure_odds, 4),
            "relative_commit_rate": round(summary.relative_commit_rate, 4),
            "caveat": summary.caveat,
        }

    if fmt == "json":
        _emit_json(
            {
                "diagnostics": [diagnostic_to_dict(d) for d in diagnostics],
                "risk": risk,
            }
        )
    else:
        for d in diagnostics:
            click.echo(f"{d.file}: {d.rule_id} {d.severity}: {d.message}")
        for file in sorted(risk):
            entry = risk[file]
            click.echo(
                f"{file}: relative failure odds {entry['relative_failure_odds']}, "
                f"relative commit rate {entry['relative_commit_rate']}"
            )
    if parse_failed:
        sys.exit(2)
    if any(d.severity == "warn" for d in diagnostics):
        sys.exit(1)


# ---------------------------------------------------------------- catalog


@cli.group("catalog")
def catalog_group() -> None:
    """Inspect, extract, or validate construct catalogs."""


@catalog_group.command("validate")
@catalog_option
def catalog_validate(catalog_path: str | None) -> None:
    """Check a catalog's totals against the published composition."""
    catalog = _load_catalog_arg(catalog_path)
    report = validate_catalog(catalog)
    for check in report.checks:
        mark = "ok" if check.passed else "FAIL"
        click.echo(f"{mark} {check.name}: {check.actual}" + ("" if check.passed else f" (expected {check.expected})"))
    if not report.ok:
        sys.exit(1)


@catalog_group.command("extract")
@click.argument("paths", nargs=-1, required=True, type=click.Path())
@catalog_option
def catalog_extract(paths: tuple[str, ...], catalog_path: str | None) -> None:
    """Build a catalog skeleton from the constructs observed in files."""
    catalog = _load_catalog_arg(catalog_path)
    files = _expand_paths(paths)
    results = [scan_file(f, catalog) for f in files]
    failed = [r for r in results if not r.parsed]
    for r in failed:
        click.echo(f"{r.file}: {r.error}", err=True)
    bags = [r.bag for r in results if r.bag is not None]
    if not bags:
        raise InputError("no workflow files could be parsed")
    extracted = extract_catalog(bags, rules=catalog.rules)
    _emit_json(catalog_to_data(extracted))
    if failed:
        sys.exit(2)


@catalog_group.command("classify")
@click.argument("construct_text")
@catalog_option
def catalog_classify(construct_text: str, catalog_path: str | None) -> None:
    """Print the feature of one abstract construct (or "unknown")."""
    catalog = _load_catalog_arg(catalog_path)
    try:
        construct = parse_construct(construct_text)
    except ValueError as exc:
        raise click.UsageError(f"bad construct: {exc}") from exc
    _emit_json(
        {
            "construct": construct_text,
            "feature": classify(construct, catalog),
            "level": level_of(construct),
            "known": construct in catalog.entries,
        }
    )


# ---------------------------------------------------------------- corpus


@cli.group("corpus")
def corpus_group() -> None:
    """Statistics over many workflows, and their change over time."""


@corpus_group.command("stats")
@click.argument("paths", nargs=-1, required=True, type=click.Path())
@catalog_option
def corpus_stats_cmd(paths: tuple[str, ...], catalog_path: str | None) -> None:
    """Frequency, concentration, and size distributions of a corpus."""
    catalog = _load_catalog_arg(catalog_path)
    files = _expand_paths(paths)
    results = [scan_file(f, catalog) for f in files]
    failed = [r for r in results if not r.parsed]
    for r in failed:
        click.echo(f"{r.file}: {r.error}", err=True)
    scans = [(r.metrics, r.bag) for r in results if r.metrics is not None and r.bag is not None]
    if not scans:
        raise InputError("no workflow files could be parsed")
    _emit_json(corpus_stats_to_dict(corpus_stats(scans)))
    if failed:
        sys.exit(2)


def _metric_value(metrics: WorkflowMetrics, metric: str) -> float:
    if metric.startswith("usage:"):
        feature = metric.split(":", 1)[1]
        return 1.0 if metrics.per_feature[feature].present else 0.0
    return float(metrics.size_metric(metric))


def _check_metric_name(metric: str) -> None:
    if metric in SIZE_METRICS:
        return
    if metric.startswith("usage:") and metric.split(":", 1)[1] in FEATURES:
        return
    raise click.UsageError(
        f"unknown metric {metric!r}; use one of {', '.join(SIZE_METRICS)} or usage:<feature>"
    )


def _monthly_values(
    manifest: str, start: str, end: str, metric: str, catalog: Catalog
) -> list[tuple[str, list[float]]]:
    try:
        intervals = load_history_manifest(manifest)
        months = month_range(start, end)
        snapshots = materialize_snapshots(intervals, months)
    except (OSError, ValueError) as exc:
        raise InputError(str(exc)) from exc

    cache: dict[str, WorkflowMetrics] = {}
    values_by_month: list[tuple[str, list[float]]] = []
    for month in months:
        values: list[float] = []
        for interval in snapshots[month]:
            if interval.file not in cache:
                result = scan_file(interval.file, catalog)
                if result.metrics is None:
                    raise InputError(f"{interval.file}: {result.error}")
                cache[interval.file] = result.metrics
            values.append(_metric_value(cache[interval.file], metric))
        values_by_month.append((month, values))
    return values_by_month


manifest_option = click.option(
    "--manifest", required=True, type=click.Path(exists=True, dir_okay=False),
    help="JSONL history manifest; file references resolve relative to it.",
)
from_option = click.option("--from", "start", required=True, metavar="YYYY-MM")
to_option = click.option("--to", "end", required=True, metavar="YYYY-MM")
metric_option = click.option(
    "--metric", default="n_paths", show_default=True,
    help=f"One of {', '.join(SIZE_METRICS)} or usage:<feature>.",
)


@corpus_group.command("evolve")
@manifest_option
@from_option
@to_option
@metric_option
@catalog_option
@click.option(
    "--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True
)
def corpus_evolve(
    manifest: str, start: str, end: str, metric: str, catalog_path: str | None, fmt: str
) -> None:
    """Monthly aggregates of one metric over snapshotted corpora."""
    _check_metric_name(metric)
    catalog = _load_catalog_arg(catalog_path)
    values_by_month = _monthly_values(manifest, start, end, metric, catalog)
    series = evolution_series(values_by_month, metric)

    if fmt == "json":
        _emit_json(
            {
                "metric": series.metric,
                "points": [
                    {
                        "month": p.month,
                        "n": p.n,
                        "mean": _num(p.mean),
                        "median": _num(p.median),
                        "q1": _num(p.q1),
                        "q3": _num(p.q3),
                    }
                    for p in series.points
                ],
            }
        )
        return
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["month", "n", "mean", "median", "q1", "q3"])
    for p in series.points:
        row = [p.month, p.n] + [
            "" if v is None else format(v, ".6g") for v in (p.mean, p.median, p.q1, p.q3)
        ]
        writer.writerow(row)
    click.echo(buffer.getvalue(), nl=False)


@corpus_group.command("trend")
@manifest_option
@from_option
@to_option
@metric_option
@catalog_option
@click.option(
    "--agg",
    type=click.Choice(["mean", "median", "q1", "q3"]),
    default="median",
    show_default=True,
    help="Monthly aggregate fed to the trend test.",
)
@click.option("--alpha", type=float, default=0.05, show_default=True)
def corpus_trend(
    manifest: str,
    start: str,
    end: str,
    metric: str,
    catalog_path: str | None,
    agg: str,
    alpha: float,
) -> None:
    """Mann-Kendall monotonic-trend test on a monthly aggregate."""
    _check_metric_name(metric)
    catalog = _load_catalog_arg(catalog_path)
    values_by_month = _monthly_values(manifest, start, end, metric, catalog)
    series = evolution_series(values_by_month, metric)
    used = [p for p in series.points if p.n > 0]
    values = [getattr(p, agg) for p in used]
    try:
        result = mann_kendall(values, alpha=alpha)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit_json(
        {
            "metric": metric,
            "agg": agg,
            "alpha": alpha,
            "months": [p.month for p in used],
            "n": result.n[0],
            "statistic": _num(result.statistic),
            "tau": _num(result.tau),
            "p_value": _num(result.p_value),
            "trend": result.trend,
            "method": result.method,
        }
    )


# ---------------------------------------------------------------- reliability


@cli.group("reliability")
def reliability_group() -> None:
    """Run-outcome metrics and their association with workflow size."""


runs_option = click.option(
    "--runs", "runs_path", required=True, type=click.Path(exists=True, dir_okay=False),
    help="JSONL of run records (workflow_id, commit_sha, committed_at, conclusion).",
)
window_option = click.option(
    "--window", "window_text", required=True, metavar="START..END",
    help='ISO instants, e.g. "2023-01-01..2023-12-31" (dates mean midnight UTC).',
)
sizes_option = click.option(
    "--sizes", "sizes_path", required=True, type=click.Path(exists=True, dir_okay=False),
    help="JSONL of scan records (wflens scan --format jsonl).",
)


def _load_runs_arg(path: str):
    try:
        return load_run_records(path)
    except (OSError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def _all_metrics(records, window: tuple[datetime, datetime]) -> list[ReliabilityMetrics]:
    groups = group_records(records)
    return [reliability_metrics(groups[w], window) for w in sorted(groups)]


def _metrics_row(m: ReliabilityMetrics) -> dict:
    return {
        "workflow_id": m.workflow_id,
        "n_runs_counted": m.n_runs_counted,
        "n_commits": m.n_commits,
        "failure_rate": _num(m.failure_rate),
        "ttr_seconds": None if m.ttr is None else m.ttr.total_seconds(),
        "availability": _num(m.availability),
    }


def _load_scan_tables(path: str):
    """Size, presence, and per-feature path tables from a scan JSONL file."""
    sizes: dict[str, dict[str, float]] = {m: {} for m in SIZE_METRICS}
    presence: dict[str, dict[str, bool]] = {f: {} for f in FEATURES}
    path_counts: dict[str, dict[str, int]] = {f: {} for f in FEATURES}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise InputError(f"{path}:{lineno}: bad JSON: {exc}") from exc
                if "n_paths" not in record:
                    continue  # parse-failure records carry no sizes
                workflow_id = record.get("workflow_id") or record["file"]
                for metric in SIZE_METRICS:
                    sizes[metric][workflow_id] = float(record[metric])
                for feature, usage in record.get("features", {}).items():
                    if feature not in presence:
                        continue
                    presence[feature][workflow_id] = bool(
                        usage["present"] and not usage["structural_only"]
                    )
                    path_counts[feature][workflow_id] = int(usage["n_paths"])
    except OSError as exc:
        raise InputError(f"cannot read sizes file {path}: {exc}") from exc
    if not sizes["n_paths"]:
        raise InputError(f"sizes file {path} holds no scan records with metrics")
    return sizes, presence, path_counts


@reliability_group.command("metrics")
@runs_option
@window_option
@click.option(
    "--format", "fmt", type=click.Choice(["jsonl", "json"]), default="jsonl", show_default=True
)
def reliability_metrics_cmd(runs_path: str, window_text: str, fmt: str) -> None:
    """Per-workflow failure rate, commits, recovery time, availability."""
    window = _parse_window(window_text)
    records = _load_runs_arg(runs_path)
    if not records:
        raise InputError(f"no run records in {runs_path}")
    rows = [_metrics_row(m) for m in _all_metrics(records, window)]
    if fmt == "json":
        _emit_json(rows)
    else:
        for row in rows:
            click.echo(json.dumps(row, sort_keys=True))


@reliability_group.command("compare")
@runs_option
@sizes_option
@window_option
@click.option(
    "--size",
    "size_filter",
    type=click.Choice(list(SIZE_METRICS)),
    default=None,
    help="Show only this size metric's cells (tests still adjust jointly).",
)
@click.option("--alpha", type=float, default=0.01, show_default=True)
def reliability_compare(
    runs_path: str, sizes_path: str, window_text: str, size_filter: str | None, alpha: float
) -> None:
    """Small-vs-large workflow comparison on every outcome metric."""
    window = _parse_window(window_text)
    records = _load_runs_arg(runs_path)
    sizes, _, _ = _load_scan_tables(sizes_path)
    metrics = _all_metrics(records, window)
    try:
        report = compare_groups(sizes, outcome_table(metrics), alpha=alpha)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    cells = [
        {
            "size_metric": c.size_metric,
            "outcome": c.outcome,
            "n_small": c.n_small,
            "n_large": c.n_large,
            "u_statistic": c.u_statistic,
            "p_raw": _num(c.p_raw),
            "p_adjusted": _num(c.p_adjusted),
            "delta": None if c.effect is None else _num(c.effect.delta),
            "magnitude": None if c.effect is None else c.effect.magnitude,
            "significant": c.significant,
        }
        for c in report.cells
        if size_filter is None or c.size_metric == size_filter
    ]
    _emit_json({"alpha": report.alpha, "cells": cells})


@reliability_group.command("regress")
@runs_option
@sizes_option
@window_option
@click.option(
    "--analysis",
    type=click.Choice(["sizes", "features"]),
    default="sizes",
    show_default=True,
)
@click.option(
    "--features",
    "features_text",
    default=None,
    help="Comma-separated feature names (features analysis only).",
)
@click.option("--min-runs", type=int, default=3, show_default=True)
def reliability_regress(
    runs_path: str,
    sizes_path: str,
    window_text: str,
    analysis: str,
    features_text: str | None,
    min_runs: int,
) -> None:
    """Univariate outcome regressions on sizes or feature usage."""
    window = _parse_window(window_text)
    records = _load_runs_arg(runs_path)
    sizes, presence, path_counts = _load_scan_tables(sizes_path)
    metrics = _all_metrics(records, window)
    if analysis == "sizes":
        if features_text is not None:
            raise click.UsageError("--features only applies to --analysis features")
        rows = regress_sizes(sizes, metrics, min_runs=min_runs)
    else:
        wanted = None
        if features_text is not None:
            wanted = [f.strip() for f in features_text.split(",") if f.strip()]
            unknown = [f for f in wanted if f not in FEATURES]
            if unknown:
                raise click.UsageError(f"unknown features: {', '.join(unknown)}")
        try:
            rows = regress_features(
                presence, path_counts, metrics, min_runs=min_runs, features=wanted
            )
        except ValueError as exc:
            raise click.UsageError(str(exc)) from exc
    _emit_json(
        {
            "analysis": analysis,
            "rows": [
                {
                    "predictor": r.predictor,
                    "outcome": r.outcome,
                    "analysis": r.analysis,
                    "ratio": _num(r.ratio),
                    "ci_low": _num(r.ci_low),
                    "ci_high": _num(r.ci_high),
                    "p_raw": _num(r.p_raw),
                    "p_adjusted": _num(r.p_adjusted),
                    "n": r.n,
                }
                for r in rows
            ],
        }
    )


def main(argv: list[str] | None = None) -> None:
    """Entry point mapping usage mistakes to exit code 64."""
    try:
        cli.main(args=argv, prog_name="wflens", standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.UsageError as exc:
        exc.show()
        sys.exit(64)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    sys.exit(0)


if __name__ == "__main__":
    main()
