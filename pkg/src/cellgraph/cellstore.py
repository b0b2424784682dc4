"""Flat store of content cells.

Cells are the only carriers of content bytes. A cell is either a paragraph
(holding an inline tree) or one of the singled-out atoms: title, author,
keyword, directory-entry. Atom content is plain text with no markup at all.
Nothing in a cell can express a link target; linking lives elsewhere.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import InvalidCell, NotFound
from .markup import Inline, serialize_paragraph, tree_problems

ATOM_KINDS = ("title", "author", "keyword", "directory-entry")
CELL_KINDS = ("paragraph",) + ATOM_KINDS

CELL_ID_RE = re.compile(r"^[a-z0-9][a-z0-9-]{0,63}$")
COMPOSITE_PREFIX = "x-"


def is_cell_id(token: str) -> bool:
    """Cell ids share the token grammar but never the composite prefix."""
    return bool(CELL_ID_RE.match(token)) and not token.startswith(COMPOSITE_PREFIX)


def is_composite_id(token: str) -> bool:
    return bool(CELL_ID_RE.match(token)) and token.startswith(COMPOSITE_PREFIX)


@dataclass
class Cell:
    id: str
    kind: str
    content: Inline | str
    meta: dict[str, str] = field(default_factory=dict)

    def content_markup(self) -> str:
        """Canonical byte form of the content (markup for paragraphs)."""
        if isinstance(self.content, Inline):
            return serialize_paragraph(self.content)
        return self.content


def cell_problems(cell: Cell) -> list[str]:
    problems: list[str] = []
    if not is_cell_id(cell.id):
        problems.append(f"bad cell id {cell.id!r}")
    if cell.kind not in CELL_KINDS:
        problems.append(f"unknown cell kind {cell.kind!r}")
        return problems
    if cell.kind == "paragraph":
        if not isinstance(cell.content, Inline):
            problems.append("paragraph content must be an inline tree")
        else:
            problems.extend(tree_problems(cell.content))
    else:
        if not isinstance(cell.content, str):
            problems.append(f"{cell.kind} content must be a plain string")
        elif "<" in cell.content or ">" in cell.content:
            problems.append(f"{cell.kind} content may not contain markup")
    for key, value in cell.meta.items():
        if not isinstance(key, str) or not key:
            problems.append("meta keys must be non-empty strings")
        if not isinstance(value, str):
            problems.append(f"meta value for {key!r} must be a string")
    return problems


def validate_cell(cell: Cell) -> None:
    problems = cell_problems(cell)
    if problems:
        raise InvalidCell("; ".join(problems))


class CellStore:
    """In-memory id -> Cell map. Mutation ordering is the repository's job."""

    def __init__(self) -> None:
        self._cells: dict[str, Cell] = {}

    def __contains__(self, cell_id: str) -> bool:
        return cell_id in self._cells

    def __len__(self) -> int:
        return len(self._cells)

    def put(self, cell: Cell) -> None:
        """Validate and store; an existing cell with the same id is replaced."""
        validate_cell(cell)
        self._cells[cell.id] = Cell(cell.id, cell.kind, cell.content, dict(cell.meta))

    def get(self, cell_id: str) -> Cell:
        try:
            return self._cells[cell_id]
        except KeyError:
            raise NotFound(f"no cell {cell_id!r}") from None

    def remove(self, cell_id: str) -> None:
        if cell_id not in self._cells:
            raise NotFound(f"no cell {cell_id!r}")
        del self._cells[cell_id]

    def ids(self) -> list[str]:
        return sorted(self._cells)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CellStore):
            return NotImplemented
        return self._cells == other._cells
