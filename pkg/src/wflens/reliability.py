"""Run-outcome analytics: failure rate, commit counts, repair time, availability.

Run records arrive as JSONL, one run per line, with a workflow id, commit
sha, UTC timestamp, and conclusion.  Only success/failure runs count toward
rates and the carry-forward state machine; cancelled and skipped runs are
kept for commit counting but cause no state transition.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from .stats import (
    EffectSize,
    bh_adjust,
    cliffs_delta,
    effect_table,
    fit_binomial_logistic,
    fit_negative_binomial,
    mann_whitney_u,
)

log = logging.getLogger(__name__)

CONCLUSIONS = ("success", "failure", "cancelled", "skipped", "other")
OUTCOME_METRICS = ("failure_rate", "n_commits", "ttr", "availability")
SIZE_METRICS = ("n_paths", "n_constructs", "n_features", "path_construct_ratio")
ALPHA = 0.01
MIN_RUNS = 3
USAGE_BAND = (0.05, 0.95)


@dataclass(frozen=True)
class RunRecord:
    workflow_id: str
    commit_sha: str
    committed_at: datetime
    conclusion: str


def _parse_instant(text: str) -> datetime:
    value = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if value.tzinfo is None:
        value = value.replace(tzinfo=timezone.utc)
    return value.astimezone(timezone.utc)


def load_run_records(path: str | Path) -> list[RunRecord]:
    """Read run records from JSONL, sorted by (workflow_id, committed_at).

    Unknown conclusion strings map to ``other`` with a logged warning;
    malformed lines raise with their line number.
    """
    records: list[RunRecord] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
                conclusion = str(row["conclusion"])
                if conclusion not in CONCLUSIONS:
                    log.warning(
                        "%s:%d: unknown conclusion %r mapped to 'other'", path, lineno, conclusion
                    )
                    conclusion = "other"
                records.append(
                    RunRecord(
                        workflow_id=str(row["workflow_id"]),
                        commit_sha=str(row["commit_sha"]),
                        committed_at=_parse_instant(row["committed_at"]),
                        conclusion=conclusion,
                    )
                )
            except (KeyError, ValueError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: malformed run record: {exc}") from exc
    records.sort(key=lambda r: (r.workflow_id, r.committed_at))
    return records


def runs_from_api_dump(dump: dict) -> list[RunRecord]:
    """Convert a CI provider's REST run-listing dump into run records.

    Expects the ``{"workflow_runs": [...]}`` shape with ``head_sha``,
    ``created_at``/``run_started_at``, ``conclusion``, and a workflow
    reference per run.  Purely offline; no network access.
    """
    records = []
    for run in dump.get("workflow_runs", []):
        conclusion = run.get("conclusion") or "other"
        if conclusion not in CONCLUSIONS:
            conclusion = "other"
        workflow_id = str(run.get("path") or run.get("workflow_id") or "")
        records.append(
            RunRecord(
                workflow_id=workflow_id,
                commit_sha=str(run.get("head_sha", "")),
                committed_at=_parse_instant(run.get("run_started_at") or run["created_at"]),
                conclusion=conclusion,
            )
        )
    records.sort(key=lambda r: (r.workflow_id, r.committed_at))
    return records


@dataclass(frozen=True)
class ReliabilityMetrics:
    workflow_id: str
    n_runs_counted: int
    n_commits: int
    failure_rate: float | None
    ttr: timedelta | None
    availability: float | None


def reliability_metrics(
    records: list[RunRecord], window: tuple[datetime, datetime]
) -> ReliabilityMetrics:
    """Outcome metrics for one workflow's runs inside a window.

    ttr covers the first breakage only: the time from the window's first
    failing commit to the next succeeding one, None when nothing fails or
    nothing recovers.  Availability carries the last success/failure state
    forward over the window, backfilling the state before the first counted
    run with that run's own state.
    """
    start, end = window
    if end <= start:
        raise ValueError("window end must be after its start")
    if not records:
        raise ValueError("no run records supplied")
    workflow_id = records[0].workflow_id
    if any(r.workflow_id != workflow_id for r in records):
        raise ValueError("records of multiple workflows passed to reliability_metrics")

    in_window = sorted(
        (r for r in records if start <= r.committed_at <= end), key=lambda r: r.committed_at
    )
    counted = [r for r in in_window if r.conclusion in ("success", "failure")]
    n_commits = len({r.commit_sha for r in in_window})
    failures = sum(1 for r in counted if r.conclusion == "failure")

    failure_rate = failures / len(counted) if counted else None

    ttr: timedelta | None = None
    first_failure = next((r for r in counted if r.conclusion == "failure"), None)
    if first_failure is not None:
        recovered = next(
            (
                r
                for r in counted
                if r.conclusion == "success" and r.committed_at > first_failure.committed_at
            ),
            None,
        )
        if recovered is not None:
            ttr = recovered.committed_at - first_failure.committed_at

    availability: float | None = None
    if counted:
        failed_time = timedelta(0)
        state = counted[0].conclusion  # backfill before the first counted run
        cursor = start
        for run in counted:
            if state == "failure":
                failed_time += run.committed_at - cursor
            cursor = run.committed_at
            state = run.conclusion
        if state == "failure":
            failed_time += end - cursor
        availability = 1.0 - failed_time / (end - start)

    return ReliabilityMetrics(
        workflow_id=workflow_id,
        n_runs_counted=len(counted),
        n_commits=n_commits,
        failure_rate=failure_rate,
        ttr=ttr,
        availability=availability,
    )


def group_records(records: list[RunRecord]) -> dict[str, list[RunRecord]]:
    groups: dict[str, list[RunRecord]] = {}
    for record in records:
        groups.setdefault(record.workflow_id, []).append(record)
    return groups


@dataclass(frozen=True)
class SizeGroups:
    metric: str
    t1: float
    t2: float
    small: tuple[str, ...]
    medium: tuple[str, ...]
    large: tuple[str, ...]


def tercile_split(values: dict[str, float], metric: str = "") -> SizeGroups:
    """Split workflows at the 33.3rd/66.7th percentiles of a size metric.

    small holds values <= t1, medium (t1, t2], large > t2.
    """
    if len(values) < 3:
        raise ValueError("tercile split needs at least 3 workflows")
    data = np.array(list(values.values()), dtype=float)
    if np.unique(data).size < 3:
        raise ValueError("degenerate grouping: fewer than 3 distinct values")
    t1, t2 = np.percentile(data, [100.0 / 3.0, 200.0 / 3.0], method="linear")
    small, medium, large = [], [], []
    for workflow_id in sorted(values):
        value = values[workflow_id]
        if value <= t1:
            small.append(workflow_id)
        elif value <= t2:
            medium.append(workflow_id)
        else:
            large.append(workflow_id)
    return SizeGroups(metric, float(t1), float(t2), tuple(small), tuple(medium), tuple(large))


@dataclass(frozen=True)
class ComparisonCell:
    size_metric: str
    outcome: str
    n_small: int
    n_large: int
    u_statistic: float | None
    p_raw: float | None
    p_adjusted: float | None
    effect: EffectSize | None
    significant: bool

    @property
    def computable(self) -> bool:
        return self.p_raw is not None


@dataclass(frozen=True)
class ComparisonReport:
    alpha: float
    cells: tuple[ComparisonCell, ...]

    def cell(self, size_metric: str, outcome: str) -> ComparisonCell:
        for cell in self.cells:
            if cell.size_metric == size_metric and cell.outcome == outcome:
                return cell
        raise KeyError((size_metric, outcome))


def outcome_table(metrics: list[ReliabilityMetrics]) -> dict[str, dict[str, float]]:
    """Per-outcome value maps; workflows lacking an outcome are omitted."""
    table: dict[str, dict[str, float]] = {name: {} for name in OUTCOME_METRICS}
    for m in metrics:
        if m.failure_rate is not None:
            table["failure_rate"][m.workflow_id] = m.failure_rate
        table["n_commits"][m.workflow_id] = float(m.n_commits)
        if m.ttr is not None:
            table["ttr"][m.workflow_id] = m.ttr.total_seconds()
        if m.availability is not None:
            table["availability"][m.workflow_id] = m.availability
    return table


def compare_groups(
    sizes: dict[str, dict[str, float]],
    outcomes: dict[str, dict[str, float]],
    alpha: float = ALPHA,
) -> ComparisonReport:
    """Small-vs-large comparison across all size metrics and outcomes.

    Every size metric is tercile-split; each outcome is tested large vs
    small with a two-sided Mann-Whitney U plus Cliff's delta (positive
    delta: larger workflows have higher values).  BH runs jointly over all
    cells; MTTR cells cover only workflows that recovered.
    """
    prepared = []
    for size_metric in SIZE_METRICS:
        if size_metric not in sizes:
            continue
        groups = tercile_split(sizes[size_metric], size_metric)
        for outcome in OUTCOME_METRICS:
            values = outcomes.get(outcome, {})
            small = [values[w] for w in groups.small if w in values]
            large = [values[w] for w in groups.large if w in values]
            prepared.append((size_metric, outcome, small, large))

    raw_ps: list[float] = []
    partials = []
    for size_metric, outcome, small, large in prepared:
        if not small or not large:
            partials.append((size_metric, outcome, small, large, None, None, None))
            continue
        test = mann_whitney_u(large, small)
        effect = cliffs_delta(large, small)
        raw_ps.append(test.p_value)
        partials.append((size_metric, outcome, small, large, test.statistic, test.p_value, effect))

    adjusted = bh_adjust(raw_ps) if raw_ps else []
    adj_iter = iter(adjusted)
    cells = []
    for size_metric, outcome, small, large, u, p_raw, effect in partials:
        p_adj = next(adj_iter) if p_raw is not None else None
        cells.append(
            ComparisonCell(
                size_metric=size_metric,
                outcome=outcome,
                n_small=len(small),
                n_large=len(large),
                u_statistic=u,
                p_raw=p_raw,
                p_adjusted=p_adj,
                effect=effect,
                significant=p_adj is not None and p_adj < alpha,
            )
        )
    return ComparisonReport(alpha=alpha, cells=tuple(cells))


@dataclass(frozen=True)
class RegressionRow:
    predictor: str
    outcome: str
    analysis: str  # size | presence | per_path
    ratio: float
    ci_low: float
    ci_high: float
    p_raw: float
    p_adjusted: float
    n: int


def _regress_failure(x: list[float], successes: list[int], trials: list[int]):
    design = np.column_stack([np.ones(len(x)), np.asarray(x, dtype=float)])
    fit = fit_binomial_logistic(design, successes, trials, terms=("intercept", "slope"))
    return fit


def _regress_commits(x: list[float], counts: list[int]):
    design = np.column_stack([np.ones(len(x)), np.asarray(x, dtype=float)])
    fit = fit_negative_binomial(design, counts, terms=("intercept", "slope"))
    return fit


def _slope_row(fit) -> tuple[float, float, float, float]:
    table = effect_table(fit)
    row = table[1]
    return row.ratio, row.ci_low, row.ci_high, row.p_value


def regress_sizes(
    sizes: dict[str, dict[str, float]],
    metrics: list[ReliabilityMetrics],
    min_runs: int = MIN_RUNS,
) -> list[RegressionRow]:
    """Univariate regressions of run outcomes on each size metric.

    Failure odds use binomial logistic regression with the counted runs as
    trials; commit counts use the negative binomial.  Workflows with fewer
    than ``min_runs`` counted runs are excluded.  BH spans all reported
    slopes jointly.
    """
    usable = {m.workflow_id: m for m in metrics if m.n_runs_counted >= min_runs}
    results = []
    for size_metric in SIZE_METRICS:
        if size_metric not in sizes:
            continue
        ids = [w for w in sorted(sizes[size_metric]) if w in usable]
        if len(ids) < 3:
            continue
        x = [sizes[size_metric][w] for w in ids]
        failures = [round(usable[w].failure_rate * usable[w].n_runs_counted) for w in ids]
        trials = [usable[w].n_runs_counted for w in ids]
        commits = [usable[w].n_commits for w in ids]
        fit_f = _regress_failure(x, failures, trials)
        fit_c = _regress_commits(x, commits)
        for outcome, fit in (("failure_rate", fit_f), ("n_commits", fit_c)):
            if not fit.converged:
                continue
            ratio, lo, hi, p = _slope_row(fit)
            results.append((size_metric, outcome, "size", ratio, lo, hi, p, len(ids)))

    adjusted = bh_adjust([r[6] for r in results]) if results else []
    return [
        RegressionRow(
            predictor=pred,
            outcome=outcome,
            analysis=analysis,
            ratio=ratio,
            ci_low=lo,
            ci_high=hi,
            p_raw=p,
            p_adjusted=adj,
            n=n,
        )
        for (pred, outcome, analysis, ratio, lo, hi, p, n), adj in zip(results, adjusted)
    ]


def features_in_band(
    presence: dict[str, dict[str, bool]],
    band: tuple[float, float] = USAGE_BAND,
) -> list[str]:
    """Features whose usage rate lies inside [5%, 95%] of the workflows."""
    out = []
    for feature in sorted(presence):
        rows = presence[feature]
        if not rows:
            continue
        rate = sum(1 for v in rows.values() if v) / len(rows)
        if band[0] <= rate <= band[1]:
            out.append(feature)
    return out


def regress_features(
    presence: dict[str, dict[str, bool]],
    path_counts: dict[str, dict[str, int]],
    metrics: list[ReliabilityMetrics],
    min_runs: int = MIN_RUNS,
    features: list[str] | None = None,
) -> list[RegressionRow]:
    """Per-feature univariate regressions: presence and per-feature paths.

    Features outside the 5%-95% usage band are excluded; requesting one
    raises an error naming the band rule.  BH spans all reported slopes.
    """
    band = features_in_band(presence)
    if features is None:
        features = band
    else:
        outside = [f for f in features if f not in band]
        if outside:
            raise ValueError(
                f"features outside the {USAGE_BAND[0]:.0%}-{USAGE_BAND[1]:.0%} usage band: "
                + ", ".join(sorted(outside))
            )
    usable = {m.workflow_id: m for m in metrics if m.n_runs_counted >= min_runs}

    results = []
    for feature in features:
        for analysis, table in (("presence", presence[feature]), ("per_path", path_counts[feature])):
            ids = [w for w in sorted(table) if w in usable]
            if len(ids) < 3:
                continue
            x = [float(table[w]) for w in ids]
            if len(set(x)) < 2:
                continue
            failures = [round(usable[w].failure_rate * usable[w].n_runs_counted) for w in ids]
            trials = [usable[w].n_runs_counted for w in ids]
            commits = [usable[w].n_commits for w in ids]
            fit_f = _regress_failure(x, failures, trials)
            fit_c = _regress_commits(x, commits)
            for outcome, fit in (("failure_rate", fit_f), ("n_commits", fit_c)):
                if not fit.converged:
                    continue
                ratio, lo, hi, p = _slope_row(fit)
                results.append((feature, outcome, analysis, ratio, lo, hi, p, len(ids)))

    adjusted = bh_adjust([r[6] for r in results]) if results else []
    return [
        RegressionRow(
            predictor=pred,
            outcome=outcome,
            analysis=analysis,
            ratio=ratio,
            ci_low=lo,
            ci_high=hi,
            p_raw=p,
            p_adjusted=adj,
            n=n,
        )
        for (pred, outcome, analysis, ratio, lo, hi, p, n), adj in zip(results, adjusted)
    ]
