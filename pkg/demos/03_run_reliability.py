"""
Run outcomes: failure rate, recovery time, availability, and their
association with workflow size
==================================================================

"""

from datetime import datetime, timedelta, timezone

import numpy as np

import wflens
from wflens.reliability import RunRecord, group_records, outcome_table

UTC = timezone.utc
START = datetime(2023, 1, 1, tzinfo=UTC)
WINDOW = (START, START + timedelta(days=365))

# ----------------------------------------------------------------------
# A single workflow's history, by hand.  Conclusions come from the CI
# provider; commit timestamps order the runs.
history = [
    RunRecord("ci.yml", "c1", START + timedelta(days=0), "success"),
    RunRecord("ci.yml", "c2", START + timedelta(days=40), "failure"),
    RunRecord("ci.yml", "c3", START + timedelta(days=45), "failure"),
    RunRecord("ci.yml", "c4", START + timedelta(days=60), "success"),
    RunRecord("ci.yml", "c5", START + timedelta(days=200), "cancelled"),
]

m = wflens.reliability_metrics(history, WINDOW)
print(f"runs counted:  {m.n_runs_counted}   (cancelled/skipped are excluded)")
print(f"commits:       {m.n_commits}")
print(f"failure rate:  {m.failure_rate:.2f}")
print(f"time to repair: {m.ttr.days} days  (first failure to next success)")
print(f"availability:  {m.availability:.3f}  (share of the year spent green)")

# ----------------------------------------------------------------------
# Does size go hand in hand with worse outcomes?  Synthesize a corpus
# where failure probability grows with path count, then compare the
# smallest third against the largest third.
rng = np.random.default_rng(7)
sizes = {"n_paths": {}}
records = []
for i in range(300):
    wid = f"wf{i:03d}"
    n_paths = int(np.clip(np.round(np.exp(rng.normal(3.3, 0.7))), 5, 300))
    sizes["n_paths"][wid] = float(n_paths)
    p_fail = float(np.clip(0.05 + n_paths / 250, 0.05, 0.9))
    for j in range(int(rng.integers(8, 13))):
        records.append(
            RunRecord(
                wid,
                f"{wid}-c{j}",
                START + timedelta(days=float(rng.uniform(0, 364))),
                "failure" if rng.random() < p_fail else "success",
            )
        )

groups = group_records(records)
metrics = [wflens.reliability_metrics(groups[w], WINDOW) for w in sorted(groups)]
report = wflens.compare_groups(sizes, outcome_table(metrics), alpha=0.01)

print("\nsmall vs large tercile (Cliff's delta; + means large is higher):")
for cell in report.cells:
    flag = "*" if cell.significant else " "
    delta = "n/a " if cell.effect is None else f"{cell.effect.delta:+.2f}"
    print(f"  {cell.size_metric:8s} -> {cell.outcome:13s} delta={delta} {flag}")

# ----------------------------------------------------------------------
# The same association as a regression: per additional path, the odds
# of a failing run and the rate of maintenance commits.
rows = wflens.regress_sizes(sizes, metrics)
print("\nper-unit effect of n_paths:")
for row in rows:
    print(
        f"  {row.outcome:13s} ratio={row.ratio:.4f} "
        f"[{row.ci_low:.4f}, {row.ci_high:.4f}]  p_adj={row.p_adjusted:.2e}  n={row.n}"
    )
