"""Parsing and path enumeration."""

import yaml
import pytest
from hypothesis import given, strategies as st

import wflens
from wflens.model import Index, Key, Mapping, Scalar, Sequence

from conftest import FIXTURES

# Hand-derived document-order path list for the two-job matrix workflow.
NODE_CI_PATHS = [
    "name",
    "on",
    "on.push",
    "on.push.branches",
    "on.push.branches[0]",
    "permissions",
    "permissions.contents",
    "jobs",
    "jobs.build",
    "jobs.build.strategy",
    "jobs.build.strategy.matrix",
    "jobs.build.strategy.matrix.os",
    "jobs.build.strategy.matrix.os[0]",
    "jobs.build.strategy.matrix.os[1]",
    "jobs.build.runs-on",
    "jobs.build.steps",
    "jobs.build.steps[0]",
    "jobs.build.steps[0].uses",
    "jobs.build.steps[1]",
    "jobs.build.steps[1].run",
    "jobs.test",
    "jobs.test.needs",
    "jobs.test.runs-on",
    "jobs.test.steps",
    "jobs.test.steps[0]",
    "jobs.test.steps[0].run",
]


def count_nodes(value) -> int:
    """Independent oracle: mapping entries plus sequence items, recursively."""
    if isinstance(value, dict):
        return len(value) + sum(count_nodes(v) for v in value.values())
    if isinstance(value, list):
        return len(value) + sum(count_nodes(v) for v in value)
    return 0


def test_minimal_document():
    tree = wflens.parse_workflow("name: CI\n")
    assert len(tree.root.entries) == 1
    key, child = tree.root.entries[0]
    assert key == "name"
    assert child == Scalar("CI", "string")


def test_node_ci_paths_exact(node_ci_paths):
    rendered = [wflens.render_path(p) for p in node_ci_paths]
    assert rendered == NODE_CI_PATHS


def test_path_count_matches_independent_walk(node_ci_text, node_ci_paths):
    assert len(node_ci_paths) == count_nodes(yaml.safe_load(node_ci_text)) == 26


def test_path_count_oracle_on_fixture_tree(catalog):
    for file in wflens.discover_workflow_files(FIXTURES / "corpus"):
        text = file.read_text(encoding="utf-8")
        paths = wflens.enumerate_paths(wflens.parse_workflow(text))
        assert len(paths) == count_nodes(yaml.safe_load(text))


def test_scalar_payload_kinds():
    tree = wflens.parse_workflow(
        "name: CI\ncount: 3\nrate: 1.5\nflag: true\nblank: null\n"
    )
    kinds = {k: v.kind for k, v in tree.root.entries}
    assert kinds == {
        "name": "string",
        "count": "int",
        "rate": "float",
        "flag": "bool",
        "blank": "null",
    }


def test_top_level_on_key_is_normalized():
    for spelling in ("on", '"on"', "true", "True", "yes"):
        tree = wflens.parse_workflow(f"{spelling}:\n  push:\n")
        assert wflens.render_path(wflens.enumerate_paths(tree)[0]) == "on"


def test_nested_boolean_keys_stay_put():
    tree = wflens.parse_workflow("jobs:\n  a:\n    true: x\n")
    rendered = [wflens.render_path(p) for p in wflens.enumerate_paths(tree)]
    assert "jobs.a.true" in rendered


def test_duplicate_keys_rejected():
    with pytest.raises(wflens.WorkflowParseError) as exc:
        wflens.parse_workflow("name: a\nname: b\n")
    assert "duplicate" in str(exc.value)
    assert exc.value.line is not None


def test_multiple_documents_rejected():
    with pytest.raises(wflens.WorkflowParseError, match="document"):
        wflens.parse_workflow("name: a\n---\nname: b\n")


def test_non_mapping_root_rejected():
    with pytest.raises(wflens.WorkflowParseError, match="mapping"):
        wflens.parse_workflow("- a\n- b\n")


def test_empty_document_rejected():
    with pytest.raises(wflens.WorkflowParseError):
        wflens.parse_workflow("")


def test_syntax_error_carries_position():
    text = (FIXTURES / "broken.yml").read_text(encoding="utf-8")
    with pytest.raises(wflens.WorkflowParseError) as exc:
        wflens.parse_workflow(text)
    assert exc.value.line == 2
    assert exc.value.column is not None


def test_anchor_aliases_expand():
    tree = wflens.parse_workflow("base: &b\n  x: 1\n  y: 2\nother: *b\n")
    rendered = [wflens.render_path(p) for p in wflens.enumerate_paths(tree)]
    assert rendered == ["base", "base.x", "base.y", "other", "other.x", "other.y"]


def test_recursive_alias_rejected():
    with pytest.raises(wflens.WorkflowParseError, match="cycle"):
        wflens.parse_workflow("a: &x\n  b: *x\n")


def test_bom_is_stripped():
    tree = wflens.parse_workflow("\ufeffname: CI\n")
    assert wflens.render_path(wflens.enumerate_paths(tree)[0]) == "name"


def test_render_parse_round_trip_on_fixture(node_ci_paths):
    for path in node_ci_paths:
        assert wflens.parse_path(wflens.render_path(path)) == path


_key_chars = st.text(
    alphabet="abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-",
    min_size=1,
    max_size=12,
)
_segments = st.lists(
    st.one_of(_key_chars.map(Key), st.integers(min_value=0, max_value=99).map(Index)),
    min_size=0,
    max_size=6,
)


@given(first=_key_chars, rest=_segments)
def test_render_parse_fixpoint(first, rest):
    path = (Key(first), *rest)
    assert wflens.parse_path(wflens.render_path(path)) == path


def test_discovery_prefers_canonical_layout():
    files = wflens.discover_workflow_files(FIXTURES / "corpus")
    names = [f.name for f in files]
    assert names == ["ci.yml", "release.yml", "tiny.yml"]
    assert all(".github/workflows" in str(f) for f in files)


def test_discovery_falls_back_to_flat_search(tmp_path):
    (tmp_path / "sub").mkdir()
    (tmp_path / "a.yml").write_text("name: a\n")
    (tmp_path / "sub" / "b.yaml").write_text("name: b\n")
    names = [f.name for f in wflens.discover_workflow_files(tmp_path)]
    assert names == ["a.yml", "b.yaml"]


def test_tree_nodes_are_immutable(node_ci_text):
    tree = wflens.parse_workflow(node_ci_text)
    assert isinstance(tree.root, Mapping)
    with pytest.raises(AttributeError):
        tree.root.entries = ()
    seq = next(v for k, v in tree.root.entries if k == "jobs")
    assert isinstance(seq, Mapping)


def test_sequences_hold_nodes(node_ci_text):
    tree = wflens.parse_workflow(node_ci_text)
    jobs = dict(tree.root.entries)["jobs"]
    build = dict(jobs.entries)["build"]
    steps = dict(build.entries)["steps"]
    assert isinstance(steps, Sequence)
    assert len(steps.items) == 2
