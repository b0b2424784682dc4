"""Persistent records of the three link layers: anchors, links, contexts.

These are pure data plus predicate matching; evaluation against a content
snapshot lives in :mod:`cellgraph.miracle`. All predicates are ordered
conjunctions of equality clauses, serialized as ``[{key, value}, ...]``.
Clause keys:

    cell queries    "kind" or "meta.<name>"
    anchor queries  "meta.<name>"
    link rules      "group" or "meta.<name>"
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cellstore import Cell
from .fragment import FragmentSelector

ROLES = ("source", "destination", "bidirectional")
RULE_OPS = ("include_group", "exclude_group", "include_where", "exclude_where")


@dataclass(frozen=True)
class Clause:
    key: str
    value: str


@dataclass
class AnchorDef:
    """Layer 1: sub-allocates content, by fixed cell or by cell query."""

    id: str
    selector: FragmentSelector
    target_cell: str | None = None
    target_query: tuple[Clause, ...] | None = None
    meta: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Endpoint:
    """One end of a link: a fixed anchor id or a query over anchor meta."""

    role: str
    anchor: str | None = None
    query: tuple[Clause, ...] | None = None

    @property
    def source_capable(self) -> bool:
        return self.role in ("source", "bidirectional")

    @property
    def destination_capable(self) -> bool:
        return self.role in ("destination", "bidirectional")


@dataclass
class LinkDef:
    """Layer 2: relates two or more anchors, statically or by meta query."""

    id: str
    group: str
    endpoints: tuple[Endpoint, ...]
    meta: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Rule:
    op: str
    group: str | None = None
    clauses: tuple[Clause, ...] | None = None


@dataclass
class LinkContext:
    """Layer 3: an ordered rule list choosing which links decorate a view.

    Links start excluded; rules run in order and later rules override
    earlier ones per link.
    """

    id: str
    name: str
    rules: tuple[Rule, ...] = ()


class Linkbase:
    def __init__(self) -> None:
        self.anchors: dict[str, AnchorDef] = {}
        self.links: dict[str, LinkDef] = {}

    def put_anchor(self, anchor: AnchorDef) -> None:
        problems = anchor_problems(anchor)
        if problems:
            from .errors import InvalidLink

            raise InvalidLink("; ".join(problems))
        self.anchors[anchor.id] = anchor

    def put_link(self, link: LinkDef) -> None:
        problems = link_problems(link)
        if problems:
            from .errors import InvalidLink

            raise InvalidLink("; ".join(problems))
        self.links[link.id] = link

    def anchor_ids(self) -> list[str]:
        return sorted(self.anchors)

    def link_ids(self) -> list[str]:
        return sorted(self.links)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Linkbase):
            return NotImplemented
        return self.anchors == other.anchors and self.links == other.links


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def anchor_problems(anchor: AnchorDef) -> list[str]:
    problems = []
    if (anchor.target_cell is None) == (anchor.target_query is None):
        problems.append("anchor needs exactly one of target_cell / target_query")
    if anchor.target_query is not None:
        for clause in anchor.target_query:
            if clause.key != "kind" and not clause.key.startswith("meta."):
                problems.append(f"bad cell-query key {clause.key!r}")
    return problems


def link_problems(link: LinkDef) -> list[str]:
    problems = []
    if len(link.endpoints) < 2:
        problems.append("link needs at least two endpoints")
    for ep in link.endpoints:
        if ep.role not in ROLES:
            problems.append(f"bad endpoint role {ep.role!r}")
        if (ep.anchor is None) == (ep.query is None):
            problems.append("endpoint needs exactly one of anchor / query")
        if ep.query is not None:
            for clause in ep.query:
                if not clause.key.startswith("meta."):
                    problems.append(f"bad anchor-query key {clause.key!r}")
    if not any(ep.source_capable for ep in link.endpoints):
        problems.append("link has no source-capable endpoint")
    if not any(ep.destination_capable for ep in link.endpoints):
        problems.append("link has no destination-capable endpoint")
    return problems


def context_problems(context: LinkContext) -> list[str]:
    problems = []
    for rule in context.rules:
        if rule.op not in RULE_OPS:
            problems.append(f"bad rule op {rule.op!r}")
            continue
        if rule.op.endswith("_group") and not rule.group:
            problems.append(f"{rule.op} needs a group")
        if rule.op.endswith("_where"):
            if rule.clauses is None:
                problems.append(f"{rule.op} needs clauses")
            else:
                for clause in rule.clauses:
                    if clause.key != "group" and not clause.key.startswith("meta."):
                        problems.append(f"bad link-rule key {clause.key!r}")
    return problems


# ---------------------------------------------------------------------------
# Predicate matching
# ---------------------------------------------------------------------------

def cell_matches(cell: Cell, clauses: tuple[Clause, ...]) -> bool:
    for clause in clauses:
        if clause.key == "kind":
            if cell.kind != clause.value:
                return False
        else:
            if cell.meta.get(clause.key[len("meta."):]) != clause.value:
                return False
    return True


def anchor_matches(anchor: AnchorDef, clauses: tuple[Clause, ...]) -> bool:
    for clause in clauses:
        if anchor.meta.get(clause.key[len("meta."):]) != clause.value:
            return False
    return True


def link_matches(link: LinkDef, clauses: tuple[Clause, ...]) -> bool:
    for clause in clauses:
        if clause.key == "group":
            if link.group != clause.value:
                return False
        else:
            if link.meta.get(clause.key[len("meta."):]) != clause.value:
                return False
    return True


def rule_matches(rule: Rule, link: LinkDef) -> bool:
    if rule.op.endswith("_group"):
        return link.group == rule.group
    return link_matches(link, rule.clauses or ())
