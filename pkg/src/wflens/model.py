"""Workflow documents as trees of addressable YAML paths.

A *path* names one YAML node by the chain of mapping keys and sequence
indices leading to it, e.g. ``jobs.build.steps[0].uses``.  Interior mapping
keys are paths too; scalar values are payload carried by their owning path,
not paths of their own.  The document root is not a path.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import yaml


class WorkflowParseError(ValueError):
    """A workflow document could not be parsed into a tree."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True, slots=True)
class Key:
    """A mapping-key path segment."""

    name: str


@dataclass(frozen=True, slots=True)
class Index:
    """A sequence-index path segment."""

    position: int


Segment = Union[Key, Index]
ConcretePath = tuple[Segment, ...]


@dataclass(frozen=True, slots=True)
class Scalar:
    value: object
    kind: str  # string | int | float | bool | null


@dataclass(frozen=True, slots=True)
class Mapping:
    entries: tuple[tuple[str, "Node"], ...]


@dataclass(frozen=True, slots=True)
class Sequence:
    items: tuple["Node", ...]


Node = Union[Mapping, Sequence, Scalar]


@dataclass(frozen=True, slots=True)
class WorkflowTree:
    """Parsed workflow document; the root is always a mapping."""

    root: Mapping


_BOOL_WORDS = yaml.constructor.SafeConstructor.bool_values
_SCALAR_KINDS = {
    "tag:yaml.org,2002:str": "string",
    "tag:yaml.org,2002:int": "int",
    "tag:yaml.org,2002:float": "float",
    "tag:yaml.org,2002:bool": "bool",
    "tag:yaml.org,2002:null": "null",
}


def _mark_of(node: yaml.Node) -> tuple[int, int]:
    mark = node.start_mark
    return mark.line + 1, mark.column + 1


def _scalar_value(node: yaml.ScalarNode) -> Scalar:
    kind = _SCALAR_KINDS.get(node.tag, "string")
    text = node.value
    if kind == "bool":
        return Scalar(_BOOL_WORDS[text.lower()], "bool")
    if kind == "null":
        return Scalar(None, "null")
    if kind == "int":
        try:
            return Scalar(int(text.replace("_", ""), 0), "int")
        except ValueError:
            return Scalar(text, "string")
    if kind == "float":
        try:
            return Scalar(float(text.replace("_", "")), "float")
        except ValueError:
            return Scalar(text, "string")
    # Timestamps and any exotic resolved tags are kept as raw strings.
    return Scalar(text, "string")


def _key_text(node: yaml.Node, top_level: bool) -> str:
    if not isinstance(node, yaml.ScalarNode):
        line, col = _mark_of(node)
        raise WorkflowParseError("mapping keys must be scalars", line, col)
    text = node.value
    # YAML 1.1 resolves bare on/yes/true (any case) to booleans.  The
    # platform reads such a top-level key as the trigger table, so it is
    # normalized to the literal key "on"; everywhere else the raw spelling
    # is kept, which also keeps off/no/false keys as strings.
    if top_level and node.tag == "tag:yaml.org,2002:bool" and _BOOL_WORDS[text.lower()]:
        return "on"
    return text


def _convert(node: yaml.Node, top_level: bool, active: set[int]) -> Node:
    if id(node) in active:
        line, col = _mark_of(node)
        raise WorkflowParseError("recursive alias cycle", line, col)
    if isinstance(node, yaml.ScalarNode):
        return _scalar_value(node)
    active.add(id(node))
    try:
        if isinstance(node, yaml.SequenceNode):
            return Sequence(tuple(_convert(item, False, active) for item in node.value))
        assert isinstance(node, yaml.MappingNode)
        entries: list[tuple[str, Node]] = []
        seen: set[str] = set()
        for key_node, value_node in node.value:
            key = _key_text(key_node, top_level)
            if key in seen:
                line, col = _mark_of(key_node)
                raise WorkflowParseError(f"duplicate mapping key {key!r}", line, col)
            seen.add(key)
            entries.append((key, _convert(value_node, False, active)))
        return Mapping(tuple(entries))
    finally:
        active.discard(id(node))


def parse_workflow(text: str) -> WorkflowTree:
    """Parse one YAML document into a :class:`WorkflowTree`.

    Anchors and aliases are expanded; duplicate mapping keys, multi-document
    streams, and non-mapping roots are rejected.  A UTF-8 BOM is tolerated.
    """
    if text.startswith("\ufeff"):
        text = text[1:]
    try:
        documents = list(yaml.compose_all(text, Loader=yaml.SafeLoader))
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        problem = exc.problem or str(exc)
        if mark is not None:
            raise WorkflowParseError(problem, mark.line + 1, mark.column + 1) from exc
        raise WorkflowParseError(problem) from exc
    except yaml.YAMLError as exc:
        raise WorkflowParseError(str(exc)) from exc
    documents = [d for d in documents if d is not None]
    if not documents:
        raise WorkflowParseError("empty document")
    if len(documents) > 1:
        raise WorkflowParseError("multi-document streams are not supported")
    root = documents[0]
    if not isinstance(root, yaml.MappingNode):
        line, col = _mark_of(root)
        raise WorkflowParseError("workflow document must be a mapping", line, col)
    converted = _convert(root, True, set())
    assert isinstance(converted, Mapping)
    return WorkflowTree(converted)


def parse_workflow_file(path: str | Path) -> WorkflowTree:
    return parse_workflow(Path(path).read_text(encoding="utf-8-sig"))


def enumerate_paths(tree: WorkflowTree) -> list[ConcretePath]:
    """All paths of the tree in document order (pre-order).

    One path per mapping entry and per sequence item at every depth, so the
    count equals the number of mapping entries plus sequence items.
    """
    out: list[ConcretePath] = []

    def walk(node: Node, prefix: ConcretePath) -> None:
        if isinstance(node, Mapping):
            for key, child in node.entries:
                path = prefix + (Key(key),)
                out.append(path)
                walk(child, path)
        elif isinstance(node, Sequence):
            for i, item in enumerate(node.items):
                path = prefix + (Index(i),)
                out.append(path)
                walk(item, path)

    walk(tree.root, ())
    return out


def render_path(path: ConcretePath) -> str:
    """Dotted rendering: keys joined with ``.``, indices as ``[i]``.

    Keys are rendered raw, so rendering is not injective for keys containing
    ``.`` or ``[``; the segment tuple is the canonical identity.
    """
    if not path:
        raise ValueError("cannot render an empty path")
    parts: list[str] = []
    for segment in path:
        if isinstance(segment, Key):
            parts.append(("." if parts else "") + segment.name)
        else:
            parts.append(f"[{segment.position}]")
    return "".join(parts)


def parse_path(text: str) -> ConcretePath:
    """Inverse of :func:`render_path` on rendered strings.

    ``render(parse(render(p))) == render(p)`` always holds; segment-level
    round-tripping holds for keys without ``.`` or ``[``.
    """
    segments = _parse_segments(text)
    out: list[Segment] = []
    for kind, value in segments:
        if kind == "key":
            out.append(Key(value))
        else:
            if not value.isdigit():
                raise ValueError(f"invalid sequence index [{value}] in path {text!r}")
            out.append(Index(int(value)))
    return tuple(out)


def _parse_segments(text: str) -> list[tuple[str, str]]:
    """Split a rendered path into (kind, text) pairs, kind in {key, index}."""
    if not text:
        raise ValueError("empty path string")
    out: list[tuple[str, str]] = []
    i = 0
    expect_key = True
    while i < len(text):
        ch = text[i]
        if ch == "[" and not expect_key:
            end = text.find("]", i)
            if end < 0:
                raise ValueError(f"unterminated index in path {text!r}")
            out.append(("index", text[i + 1 : end]))
            i = end + 1
            continue
        if ch == "." and not expect_key:
            expect_key = True
            i += 1
            continue
        if not expect_key:
            raise ValueError(f"malformed path {text!r} at offset {i}")
        end = i
        while end < len(text) and text[end] not in ".[":
            end += 1
        out.append(("key", text[i:end]))
        expect_key = False
        i = end
    if expect_key:
        raise ValueError(f"malformed path {text!r}: trailing separator")
    return out


def discover_workflow_files(root: str | Path) -> list[Path]:
    """Workflow files under ``root``, sorted for deterministic processing.

    A repository checkout contributes ``.github/workflows/*.yml`` and
    ``*.yaml`` (case-sensitive extensions).  A directory without any
    ``.github/workflows`` folder is treated as a flat collection and yields
    every ``*.yml``/``*.yaml`` beneath it.
    """
    base = Path(root)
    if base.is_file():
        return [base]
    canonical = sorted(
        p
        for pattern in ("**/.github/workflows/*.yml", "**/.github/workflows/*.yaml")
        for p in base.glob(pattern)
        if p.is_file()
    )
    if canonical:
        return canonical
    return sorted(p for ext in ("yml", "yaml") for p in base.glob(f"**/*.{ext}") if p.is_file())
