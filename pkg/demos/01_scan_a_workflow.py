"""
From one workflow file to paths, constructs, and lint findings
===============================================================

"""

import wflens

# A two-job CI workflow: a build matrix over two operating systems and a
# test job that waits for it.
WORKFLOW = """\
name: CI
on:
  push:
    branches:
      - main
permissions:
  contents: read
jobs:
  build:
    strategy:
      matrix:
        os: [ubuntu-latest, macos-latest]
    runs-on: ${{ matrix.os }}
    steps:
      - uses: actions/checkout@v3
      - run: npm ci
  test:
    needs: build
    runs-on: ubuntu-latest
    steps:
      - run: npm test
"""

# Parsing gives a tree; enumerating it gives every addressable YAML node.
tree = wflens.parse_workflow(WORKFLOW)
paths = wflens.enumerate_paths(tree)
print(f"{len(paths)} paths, for example:")
for path in paths[:5]:
    print("  ", wflens.render_path(path))

# Abstraction folds user-chosen names (job ids, matrix variables, list
# positions) into placeholders, leaving the schema-level construct.
bag = wflens.abstract_workflow(paths)
print(f"\n{bag.distinct()} distinct constructs over {bag.total_paths} paths:")
for construct, count in sorted(bag.counts.items(), key=lambda kv: -kv[1])[:6]:
    print(f"  {count}x  {wflens.render_construct(construct)}")

# Every construct above is in the bundled catalog, which also knows the
# feature each one belongs to.
catalog = wflens.default_catalog()
report = wflens.validate_workflow(bag, catalog)
print(f"\nknown constructs: {len(report.known)}, unknown: {len(report.unknown)}")
print("jobs.<id>.strategy belongs to:", wflens.classify(wflens.parse_construct("jobs.<id>.strategy"), catalog))

# Per-workflow metrics: the four size measures plus per-feature usage.
metrics = wflens.workflow_metrics(bag, catalog)
print(f"\nn_paths={metrics.n_paths} n_constructs={metrics.n_constructs} "
      f"n_features={metrics.n_features} ratio={float(metrics.path_construct_ratio):.4f}")
for feature, usage in metrics.per_feature.items():
    if usage.present and not usage.structural_only:
        print(f"  uses {feature}: {usage.n_paths} paths")

# The lint layer weights what it sees by effect sizes measured on public
# repositories: odds ratios for run failure, rate ratios for maintenance
# commits.  Associations, not causes; every message repeats that caveat.
diagnostics, risk = wflens.evaluate(metrics, file="ci.yml")
print()
for d in diagnostics:
    print(f"{d.rule_id} {d.severity}: {d.message}")
print(f"\nrelative failure odds vs a bare workflow: {risk.relative_failure_odds:.2f}")
print(f"relative maintenance-commit rate:          {risk.relative_commit_rate:.2f}")
