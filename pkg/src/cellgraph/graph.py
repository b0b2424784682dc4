"""Named, ordered, directed relations between components.

All structure and context lives here. A relation points from a composite
(page, section, course, site) at a child node, which is either another
composite or a content cell. Relations under one parent are kept at
contiguous 1-based positions. Cycles through composites are legal and left
to the access logic; self-loops are rejected as degenerate.

Relations flagged hierarchical form a spanning forest over the graph: at
most one hierarchical parent per child, unique relation names among one
parent's hierarchical children, and no hierarchical cycles. That subset is
the traditional virtual-filesystem view; everything else is free-form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

from .cellstore import is_cell_id, is_composite_id
from .errors import (
    HierarchicalConflict,
    NotFound,
    PositionOutOfRange,
    SelfLoop,
    UnknownNode,
)

COMPONENT_KINDS = ("page", "section", "course", "site")
RELATION_NAME_RE = re.compile(r"^[a-z0-9_][a-z0-9_-]{0,31}$")


@dataclass
class Component:
    id: str
    kind: str
    meta: dict[str, str] = field(default_factory=dict)


@dataclass
class Relation:
    id: str
    parent: str
    name: str
    child: str
    position: int
    hierarchical: bool = False


class RelationGraph:
    """Composite structure over a flat node space.

    Cell existence is delegated to the cell store via ``cell_exists`` so the
    graph never holds content.
    """

    def __init__(self, cell_exists: Callable[[str], bool] = lambda _: False):
        self._cell_exists = cell_exists
        self._components: dict[str, Component] = {}
        self._relations: dict[str, Relation] = {}
        # parent id -> relation ids ordered by position
        self._by_parent: dict[str, list[str]] = {}
        self._rel_seq = 0

    # --- nodes ---------------------------------------------------------

    def add_component(self, component: Component) -> None:
        if not is_composite_id(component.id):
            raise UnknownNode(f"bad composite id {component.id!r} (must carry the x- prefix)")
        if component.kind not in COMPONENT_KINDS:
            raise UnknownNode(f"unknown component kind {component.kind!r}")
        self._components[component.id] = Component(
            component.id, component.kind, dict(component.meta)
        )

    def component(self, node_id: str) -> Component:
        try:
            return self._components[node_id]
        except KeyError:
            raise UnknownNode(f"no composite {node_id!r}") from None

    def is_composite(self, node_id: str) -> bool:
        return node_id in self._components

    def node_exists(self, node_id: str) -> bool:
        return node_id in self._components or self._cell_exists(node_id)

    def component_ids(self) -> list[str]:
        return sorted(self._components)

    # --- relations -------------------------------------------------------

    def _next_relation_id(self) -> str:
        while True:
            self._rel_seq += 1
            rel_id = f"r{self._rel_seq}"
            if rel_id not in self._relations:
                return rel_id

    def add_relation(
        self,
        parent: str,
        name: str,
        child: str,
        position: int | None = None,
        hierarchical: bool = False,
        rel_id: str | None = None,
    ) -> Relation:
        """Insert a relation, shifting later siblings one position up.

        ``position`` defaults to the end of the parent's child list.
        """
        if parent not in self._components:
            raise UnknownNode(f"parent {parent!r} is not a known composite")
        if not self.node_exists(child):
            raise UnknownNode(f"child {child!r} is not a known node")
        if parent == child:
            raise SelfLoop(f"{parent!r} cannot relate to itself")
        if not RELATION_NAME_RE.match(name):
            raise UnknownNode(f"bad relation name {name!r}")
        siblings = self._by_parent.setdefault(parent, [])
        if position is None:
            position = len(siblings) + 1
        if not 1 <= position <= len(siblings) + 1:
            raise PositionOutOfRange(
                f"position {position} outside 1..{len(siblings) + 1} for {parent!r}"
            )
        if hierarchical:
            existing = self.hierarchical_parent(child)
            if existing is not None:
                raise HierarchicalConflict(
                    f"{child!r} already has hierarchical parent {existing.parent!r}"
                )
            for sib_id in siblings:
                sib = self._relations[sib_id]
                if sib.hierarchical and sib.name == name:
                    raise HierarchicalConflict(
                        f"{parent!r} already has a hierarchical child named {name!r}"
                    )
            if self.is_composite(child) and self._would_cycle_hierarchically(parent, child):
                raise HierarchicalConflict(
                    f"hierarchical edge {parent!r}->{child!r} would close a cycle"
                )
        if rel_id is None:
            rel_id = self._next_relation_id()
        elif rel_id in self._relations:
            raise PositionOutOfRange(f"relation id {rel_id!r} already in use")
        relation = Relation(rel_id, parent, name, child, position, hierarchical)
        siblings.insert(position - 1, rel_id)
        self._relations[rel_id] = relation
        self._renumber(parent)
        return relation

    def _would_cycle_hierarchically(self, parent: str, child: str) -> bool:
        # Walking up from parent must not reach child.
        seen = set()
        cursor: str | None = parent
        while cursor is not None and cursor not in seen:
            if cursor == child:
                return True
            seen.add(cursor)
            up = self.hierarchical_parent(cursor)
            cursor = up.parent if up else None
        return cursor == child

    def _renumber(self, parent: str) -> None:
        for idx, rel_id in enumerate(self._by_parent.get(parent, []), start=1):
            self._relations[rel_id].position = idx

    def remove_relation(self, rel_id: str) -> None:
        relation = self._relations.get(rel_id)
        if relation is None:
            raise NotFound(f"no relation {rel_id!r}")
        self._by_parent[relation.parent].remove(rel_id)
        del self._relations[rel_id]
        self._renumber(relation.parent)

    def relation(self, rel_id: str) -> Relation:
        try:
            return self._relations[rel_id]
        except KeyError:
            raise NotFound(f"no relation {rel_id!r}") from None

    def children(self, parent: str) -> list[tuple[str, str, str]]:
        """(name, child, relation id) tuples ordered by position."""
        if parent not in self._components:
            raise UnknownNode(f"no composite {parent!r}")
        out = []
        for rel_id in self._by_parent.get(parent, []):
            rel = self._relations[rel_id]
            out.append((rel.name, rel.child, rel.id))
        return out

    def referrers(self, child: str) -> list[tuple[str, str, str]]:
        """(parent, name, relation id) tuples ordered by (parent, position)."""
        if not self.node_exists(child):
            raise UnknownNode(f"no node {child!r}")
        hits = [r for r in self._relations.values() if r.child == child]
        hits.sort(key=lambda r: (r.parent, r.position))
        return [(r.parent, r.name, r.id) for r in hits]

    def hierarchical_parent(self, child: str) -> Relation | None:
        for rel in self._relations.values():
            if rel.hierarchical and rel.child == child:
                return rel
        return None

    def relations_sorted(self) -> list[Relation]:
        return sorted(self._relations.values(), key=lambda r: (r.parent, r.position))

    def resume_relation_counter(self) -> None:
        """After an import, continue id generation past every loaded id."""
        top = 0
        for rel_id in self._relations:
            m = re.fullmatch(r"r(\d+)", rel_id)
            if m:
                top = max(top, int(m.group(1)))
        self._rel_seq = top

    # --- cycle enumeration ------------------------------------------------

    def find_cycles(self) -> list[list[str]]:
        """Every elementary cycle, each as the relation ids traversed.

        Cycles can only run through composites (cells have no outgoing
        edges). Each cycle is reported once, anchored at its smallest
        component id; the result is sorted for stable output.
        """
        edges: dict[str, list[Relation]] = {}
        for rel in self.relations_sorted():
            if rel.child in self._components:
                edges.setdefault(rel.parent, []).append(rel)

        cycles: list[list[str]] = []
        for anchor in sorted(edges):
            self._cycles_from(anchor, anchor, [], {anchor}, edges, cycles)
        cycles.sort(key=lambda c: (len(c), c))
        return cycles

    def _cycles_from(
        self,
        anchor: str,
        node: str,
        trail: list[str],
        on_path: set[str],
        edges: dict[str, list[Relation]],
        cycles: list[list[str]],
    ) -> None:
        for rel in edges.get(node, []):
            if rel.child == anchor:
                cycles.append(trail + [rel.id])
            elif rel.child > anchor and rel.child not in on_path:
                on_path.add(rel.child)
                trail.append(rel.id)
                self._cycles_from(anchor, rel.child, trail, on_path, edges, cycles)
                trail.pop()
                on_path.remove(rel.child)

    # --- equality for import/export round-trips -----------------------------

    def snapshot_state(self) -> tuple:
        comps = tuple(
            (c.id, c.kind, tuple(sorted(c.meta.items())))
            for c in sorted(self._components.values(), key=lambda c: c.id)
        )
        rels = tuple(
            (r.id, r.parent, r.name, r.child, r.position, r.hierarchical)
            for r in self.relations_sorted()
        )
        return comps, rels

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RelationGraph):
            return NotImplemented
        return self.snapshot_state() == other.snapshot_state()
