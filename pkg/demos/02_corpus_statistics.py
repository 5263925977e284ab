"""
Corpus-level statistics: concentration, coverage, correlation
=============================================================

"""

import wflens

# Five small workflows standing in for a corpus.  Real studies point
# corpus_stats at thousands of files discovered under .github/workflows.
SOURCES = {
    "minimal": "on: push\njobs:\n  a:\n    runs-on: ubuntu-latest\n    steps:\n      - run: make\n",
    "pinned": """\
on: push
jobs:
  a:
    runs-on: ubuntu-latest
    steps:
      - uses: actions/checkout@v4
      - run: make test
""",
    "matrix": """\
on: [push, pull_request]
jobs:
  grid:
    strategy:
      matrix:
        py: ["3.10", "3.11", "3.12"]
    runs-on: ubuntu-latest
    steps:
      - uses: actions/checkout@v4
      - run: tox -e py${{ matrix.py }}
""",
    "nightly": """\
name: Nightly
on:
  schedule:
    - cron: "0 3 * * *"
env:
  CACHE: "1"
jobs:
  sweep:
    runs-on: ubuntu-latest
    steps:
      - uses: actions/checkout@v4
      - run: ./sweep.sh
        env:
          DEBUG: "0"
""",
    "deploy": """\
on:
  push:
    tags: ["v*"]
permissions:
  contents: read
jobs:
  release:
    runs-on: ubuntu-latest
    environment: production
    steps:
      - uses: actions/checkout@v4
      - run: make release
""",
}

catalog = wflens.default_catalog()
scans = []
for name, text in SOURCES.items():
    bag = wflens.abstract_workflow(wflens.enumerate_paths(wflens.parse_workflow(text)))
    scans.append((wflens.workflow_metrics(bag, catalog), bag))

stats = wflens.corpus_stats(scans)
print(f"workflows: {stats.n_workflows}")

# Construct frequency is heavily concentrated: a few constructs carry
# most paths.  The Gini coefficient summarizes that concentration.
print(f"gini over construct frequencies: {stats.gini:.3f}")
for k, share in stats.topk_share.items():
    print(f"  top {k} constructs cover {share:.0%} of paths")

print("\nmost frequent constructs:")
ranked = sorted(stats.construct_freq.items(), key=lambda kv: -kv[1].occurrences)
for construct, freq in ranked[:5]:
    print(
        f"  {freq.occurrences:3d} paths in {freq.pct_workflows:.0%} of workflows"
        f"  {wflens.render_construct(construct)}"
    )

# Bigger workflows also use more distinct constructs; the rank
# correlation makes the relationship scale-free.
rho = stats.spearman_paths_constructs
print(f"\nspearman(paths, constructs) = {rho:.3f}" if rho is not None else "\ntoo few sizes")

print("\nfeature usage share:")
for feature, rate in sorted(stats.feature_usage_rate.items(), key=lambda kv: -kv[1]):
    if rate > 0:
        print(f"  {feature:22s} {rate:.0%}")
