"""A consistent view over all stores: cells, graph, linkbase, contexts.

Pure read paths (resolution, evaluation, rendering) take a Snapshot; the
repository layer owns mutation, locking and the revision counter.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cellstore import CellStore
from .graph import Component, RelationGraph
from .linkbase import Linkbase, LinkContext


@dataclass
class Snapshot:
    cells: CellStore
    graph: RelationGraph
    linkbase: Linkbase
    contexts: dict[str, LinkContext]
    root: str
    name: str = "repo"

    @classmethod
    def create(cls, root: str = "x-root", name: str = "repo", root_kind: str = "site") -> Snapshot:
        cells = CellStore()
        graph = RelationGraph(cell_exists=cells.__contains__)
        graph.add_component(Component(root, root_kind))
        return cls(cells, graph, Linkbase(), {}, root, name)

    def is_cell(self, node_id: str) -> bool:
        return node_id in self.cells

    def node_kind(self, node_id: str) -> str:
        """Cell kind or component kind of any existing node."""
        if node_id in self.cells:
            return self.cells.get(node_id).kind
        return self.graph.component(node_id).kind

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Snapshot):
            return NotImplemented
        return (
            self.root == other.root
            and self.name == other.name
            and self.cells == other.cells
            and self.graph == other.graph
            and self.linkbase == other.linkbase
            and self.contexts == other.contexts
        )
