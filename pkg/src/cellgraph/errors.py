"""Error taxonomy shared by every layer of the engine.

Each error carries a stable machine-readable ``code`` (its class name), a
human-readable ``detail`` and, for parse-type failures, a byte ``offset``
into the offending input. The HTTP facade maps these onto status codes and
serializes them as ``{error, detail, offset?}`` bodies.
"""

from __future__ import annotations

from typing import Any


class CellGraphError(Exception):
    """Base class for all engine errors."""

    def __init__(self, detail: str, *, offset: int | None = None, **extra: Any):
        super().__init__(detail)
        self.detail = detail
        self.offset = offset
        self.extra = extra

    @property
    def code(self) -> str:
        return type(self).__name__

    def to_body(self) -> dict[str, Any]:
        body: dict[str, Any] = {"error": self.code, "detail": self.detail}
        if self.offset is not None:
            body["offset"] = self.offset
        body.update(self.extra)
        return body


# --- cell store -------------------------------------------------------------

class MalformedMarkup(CellGraphError):
    """Paragraph markup does not parse under the inline grammar."""


class InvalidCell(CellGraphError):
    """A cell violates a store invariant (the detail names which one)."""


class NotFound(CellGraphError):
    """No cell stored under the requested id."""


class StillReferenced(CellGraphError):
    """Cell cannot be deleted while relations point at it."""

    def __init__(self, detail: str, relations: list[str]):
        super().__init__(detail, relations=relations)
        self.relations = relations


# --- relation graph ----------------------------------------------------------

class UnknownNode(CellGraphError):
    """Referenced node id is not a known component or cell."""


class PositionOutOfRange(CellGraphError):
    """Relation position must fall in 1..n+1 for the parent."""


class HierarchicalConflict(CellGraphError):
    """Insertion would break the hierarchical spanning forest."""


class SelfLoop(CellGraphError):
    """A relation may not point a composite at itself."""


# --- namespace ----------------------------------------------------------------

class NoSuchSegment(CellGraphError):
    """A path segment matched no child relation."""

    def __init__(self, detail: str, *, segment: str, candidates: int = 0):
        super().__init__(detail, segment=segment, candidates=candidates)
        self.segment = segment
        self.candidates = candidates


class Ambiguous(CellGraphError):
    """A bare segment name matched several child relations."""

    def __init__(self, detail: str, *, segment: str, candidates: int):
        super().__init__(detail, segment=segment, candidates=candidates)
        self.segment = segment
        self.candidates = candidates


class IndexOutOfRange(CellGraphError):
    """An indexed segment name[k] has fewer than k matches."""


class NotComposite(CellGraphError):
    """Directory-style access applied to a cell."""


# --- addresses and fragments -----------------------------------------------

class BadScheme(CellGraphError):
    """URI does not use the engine scheme."""


class EmptyHost(CellGraphError):
    """URI host part is empty."""


class BadSegment(CellGraphError):
    """URI path segment is malformed."""


class BadFragment(CellGraphError):
    """URI fragment selector is malformed."""


class BadSelector(CellGraphError):
    """Fragment selector text does not parse."""


class BadNodePath(CellGraphError):
    """A node(...) selector step does not address a node."""


class FragmentOnComposite(CellGraphError):
    """Fragment selectors apply to cells only."""


class NotLocal(CellGraphError):
    """Dereferencing addresses of foreign hosts is not supported."""


# --- link engine --------------------------------------------------------------

class InvalidLink(CellGraphError):
    """A link definition violates an endpoint invariant."""


class UnknownContext(CellGraphError):
    """No link context registered under the requested id."""


class UnknownPage(CellGraphError):
    """Requested page is not a known composite."""


# --- render -------------------------------------------------------------------

class NotRenderable(CellGraphError):
    """Target composite has no page semantics."""


# --- service ------------------------------------------------------------------

class LoadError(CellGraphError):
    """Repository directory failed to load (detail carries path and reason)."""


class WriteError(CellGraphError):
    """Repository export failed."""
