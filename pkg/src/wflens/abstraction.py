"""Abstraction of concrete YAML paths into catalog constructs.

Sequence indices become the wildcard ``[*]``; user-chosen keys (job ids,
matrix variables, env var names, ...) become typed placeholders such as
``<id>`` or ``<var>``, driven by a table of prefix rules.  Everything else
passes through literally, so abstraction preserves segment count.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Union

from .model import ConcretePath, Index, Key

PLACEHOLDER_KINDS = ("id", "var", "param", "s_id")


@dataclass(frozen=True, slots=True)
class Wildcard:
    """An abstracted sequence index, rendered ``[*]``."""


@dataclass(frozen=True, slots=True)
class Placeholder:
    """An abstracted user-chosen key, rendered ``<kind>``."""

    kind: str

    def __post_init__(self) -> None:
        if self.kind not in PLACEHOLDER_KINDS:
            raise ValueError(f"unknown placeholder kind {self.kind!r}")


AbstractSegment = Union[Key, Wildcard, Placeholder]
Construct = tuple[AbstractSegment, ...]


@dataclass(frozen=True)
class AbstractionRule:
    """At abstracted prefix ``prefix``, keys become ``<kind>`` placeholders.

    ``except_keys`` lists reserved literal keys at that position that stay
    as-is (e.g. ``include`` under a matrix).
    """

    prefix: Construct
    kind: str
    except_keys: frozenset[str] = field(default_factory=frozenset)


class AbstractionRuleSet:
    """Prefix-indexed rule table; at most one rule per prefix."""

    def __init__(self, rules: tuple[AbstractionRule, ...]):
        table: dict[Construct, AbstractionRule] = {}
        for rule in rules:
            if rule.prefix in table:
                raise ValueError(f"ambiguous rules for prefix {render_construct(rule.prefix) if rule.prefix else '<root>'}")
            table[rule.prefix] = rule
        self.rules = rules
        self._by_prefix = table

    def placeholder_for(self, prefix: Construct, key: str) -> Placeholder | None:
        rule = self._by_prefix.get(prefix)
        if rule is None or key in rule.except_keys:
            return None
        return Placeholder(rule.kind)


@dataclass(frozen=True)
class ConstructBag:
    """Multiset of constructs from one workflow, plus the total path count."""

    counts: dict[Construct, int]
    total_paths: int

    def distinct(self) -> int:
        return len(self.counts)


def abstract_path(path: ConcretePath, rules: AbstractionRuleSet) -> Construct:
    """Abstract one concrete path left to right."""
    if not path:
        raise ValueError("cannot abstract an empty path")
    out: list[AbstractSegment] = []
    for segment in path:
        if isinstance(segment, Index):
            out.append(Wildcard())
            continue
        placeholder = rules.placeholder_for(tuple(out), segment.name)
        out.append(placeholder if placeholder is not None else Key(segment.name))
    return tuple(out)


def abstract_workflow(
    paths: list[ConcretePath], rules: AbstractionRuleSet | None = None
) -> ConstructBag:
    """Abstract every path of a workflow into a construct multiset."""
    if not paths:
        raise ValueError("workflow has no paths")
    if rules is None:
        rules = default_ruleset()
    counts = Counter(abstract_path(path, rules) for path in paths)
    return ConstructBag(dict(counts), len(paths))


def render_construct(construct: Construct) -> str:
    if not construct:
        raise ValueError("cannot render an empty construct")
    parts: list[str] = []
    for segment in construct:
        if isinstance(segment, Key):
            parts.append(("." if parts else "") + segment.name)
        elif isinstance(segment, Wildcard):
            parts.append("[*]")
        else:
            parts.append(("." if parts else "") + f"<{segment.kind}>")
    return "".join(parts)


def parse_construct(text: str) -> Construct:
    """Parse a rendered construct such as ``jobs.<id>.steps[*].uses``."""
    from .model import _parse_segments  # shared rendered-path grammar

    out: list[AbstractSegment] = []
    for kind, value in _parse_segments(text):
        if kind == "index":
            if value == "*":
                out.append(Wildcard())
            elif value.isdigit():
                raise ValueError(f"concrete index in construct {text!r}")
            else:
                raise ValueError(f"invalid index [{value}] in construct {text!r}")
        elif value.startswith("<") and value.endswith(">") and value[1:-1] in PLACEHOLDER_KINDS:
            out.append(Placeholder(value[1:-1]))
        else:
            out.append(Key(value))
    return tuple(out)


def _segment_token(segment: AbstractSegment) -> str:
    if isinstance(segment, Key):
        return segment.name
    if isinstance(segment, Wildcard):
        return "[*]"
    return f"<{segment.kind}>"


def _prefix_from_tokens(tokens: list[str]) -> Construct:
    out: list[AbstractSegment] = []
    for token in tokens:
        if token == "[*]":
            out.append(Wildcard())
        elif token.startswith("<") and token.endswith(">"):
            out.append(Placeholder(token[1:-1]))
        else:
            out.append(Key(token))
    return tuple(out)


def ruleset_from_data(data: list[dict]) -> AbstractionRuleSet:
    rules = []
    for item in data:
        rules.append(
            AbstractionRule(
                prefix=_prefix_from_tokens(item["prefix"]),
                kind=item["kind"],
                except_keys=frozenset(item.get("except", ())),
            )
        )
    return AbstractionRuleSet(tuple(rules))


def ruleset_to_data(rules: AbstractionRuleSet) -> list[dict]:
    out = []
    for rule in rules.rules:
        item: dict = {"prefix": [_segment_token(s) for s in rule.prefix], "kind": rule.kind}
        if rule.except_keys:
            item["except"] = sorted(rule.except_keys)
        out.append(item)
    return out


def default_ruleset() -> AbstractionRuleSet:
    """The rule table bundled with the default catalog."""
    raw = json.loads(resources.files("wflens.data").joinpath("catalog.json").read_text("utf-8"))
    return ruleset_from_data(raw["rules"])
