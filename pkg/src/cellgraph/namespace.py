"""The two name spaces over the flat store.

Semantic paths walk named relations from the repository root and are
context-sensitive: resolving one reconstructs the chain of embeddings that
is the component's context. The same component reached along two chains has
two paths. The hierarchical view walks only the flagged spanning forest and
behaves like a conventional filesystem.

Cycles are legal in the graph, so every traversal here applies the same
recursion cut: no component may repeat within one path. That keeps
enumeration finite and page flattening terminating on any input.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import (
    Ambiguous,
    IndexOutOfRange,
    NoSuchSegment,
    NotComposite,
    UnknownNode,
)
from .snapshot import Snapshot

DEFAULT_MAX_DEPTH = 16

_SEGMENT_RE = re.compile(r"^([a-z0-9_][a-z0-9_-]{0,31})(?:\[([1-9][0-9]*)\])?$")


@dataclass(frozen=True)
class Segment:
    name: str
    index: int | None = None

    def text(self) -> str:
        return self.name if self.index is None else f"{self.name}[{self.index}]"


@dataclass(frozen=True)
class SemanticPath:
    segments: tuple[Segment, ...] = ()

    @classmethod
    def parse(cls, text: str) -> SemanticPath:
        if not text.startswith("/"):
            raise NoSuchSegment(f"path must be absolute, got {text!r}", segment=text)
        if text == "/":
            return cls(())
        segments = []
        for part in text[1:].split("/"):
            m = _SEGMENT_RE.match(part)
            if not m:
                raise NoSuchSegment(f"bad path segment {part!r}", segment=part)
            segments.append(Segment(m.group(1), int(m.group(2)) if m.group(2) else None))
        return cls(tuple(segments))

    def text(self) -> str:
        if not self.segments:
            return "/"
        return "/" + "/".join(seg.text() for seg in self.segments)

    def __len__(self) -> int:
        return len(self.segments)


@dataclass(frozen=True)
class ChainLink:
    """One traversal step: the composite stood on and the relation taken."""

    component: str
    relation: str


ContextChain = tuple[ChainLink, ...]


@dataclass(frozen=True)
class DirEntry:
    segment: str
    kind: str
    node: str


# ---------------------------------------------------------------------------
# Resolution
# ---------------------------------------------------------------------------

def resolve_semantic(snap: Snapshot, path: SemanticPath) -> tuple[str, ContextChain]:
    """Walk ``path`` from the root; the chain returned IS the arrival context.

    A bare name must match exactly one child relation; ``name[k]`` picks the
    k-th same-named relation in position order.
    """
    current = snap.root
    chain: list[ChainLink] = []
    for seg in path.segments:
        if not snap.graph.is_composite(current):
            raise NoSuchSegment(
                f"{seg.text()!r}: {current!r} is a cell and has no children",
                segment=seg.text(),
            )
        matches = [
            (child, rel_id)
            for (name, child, rel_id) in snap.graph.children(current)
            if name == seg.name
        ]
        if not matches:
            raise NoSuchSegment(f"no relation named {seg.name!r} under {current!r}",
                                segment=seg.text())
        if seg.index is None:
            if len(matches) > 1:
                raise Ambiguous(
                    f"{len(matches)} relations named {seg.name!r} under {current!r}, "
                    f"use {seg.name}[k]",
                    segment=seg.text(),
                    candidates=len(matches),
                )
            child, rel_id = matches[0]
        else:
            if seg.index > len(matches):
                raise IndexOutOfRange(
                    f"{seg.text()!r}: only {len(matches)} matches under {current!r}"
                )
            child, rel_id = matches[seg.index - 1]
        chain.append(ChainLink(current, rel_id))
        current = child
    return current, tuple(chain)


def resolve_hierarchical(snap: Snapshot, path: str | Sequence[str]) -> str:
    """Walk only hierarchical relations; the forest makes every step unique."""
    if isinstance(path, str):
        if not path.startswith("/"):
            raise NoSuchSegment(f"path must be absolute, got {path!r}", segment=path)
        labels = [p for p in path[1:].split("/") if p] if path != "/" else []
    else:
        labels = list(path)
    current = snap.root
    for label in labels:
        if not snap.graph.is_composite(current):
            raise NoSuchSegment(f"{label!r}: {current!r} is not a directory", segment=label)
        match = None
        for (name, child, rel_id) in snap.graph.children(current):
            if name == label and snap.graph.relation(rel_id).hierarchical:
                match = child
                break
        if match is None:
            raise NoSuchSegment(f"no hierarchical entry {label!r} under {current!r}",
                                segment=label)
        current = match
    return current


def hierarchical_path(snap: Snapshot, node: str) -> list[str] | None:
    """Labels from the root down to ``node``, or None when the node's
    hierarchical chain does not reach the root."""
    if node == snap.root:
        return []
    labels: list[str] = []
    current = node
    seen = set()
    while current != snap.root:
        if current in seen:
            return None
        seen.add(current)
        up = snap.graph.hierarchical_parent(current)
        if up is None:
            return None
        labels.append(up.name)
        current = up.parent
    labels.reverse()
    return labels


# ---------------------------------------------------------------------------
# Enumeration (path inversion)
# ---------------------------------------------------------------------------

def enumerate_paths(
    snap: Snapshot, node: str, max_depth: int = DEFAULT_MAX_DEPTH
) -> list[SemanticPath]:
    """Every simple path from the root to ``node`` within ``max_depth``
    segments, lexicographically sorted by text form.

    Segments carry an explicit [k] index exactly when the parent has several
    same-named children, so each returned path resolves unambiguously.
    """
    if not snap.graph.node_exists(node):
        raise UnknownNode(f"no node {node!r}")
    found: list[SemanticPath] = []
    if node == snap.root:
        found.append(SemanticPath(()))

    def walk(current: str, on_path: set[str], segments: list[Segment]) -> None:
        if len(segments) >= max_depth:
            return
        name_totals: dict[str, int] = {}
        for (name, _, _) in snap.graph.children(current):
            name_totals[name] = name_totals.get(name, 0) + 1
        name_seen: dict[str, int] = {}
        for (name, child, _) in snap.graph.children(current):
            ordinal = name_seen.get(name, 0) + 1
            name_seen[name] = ordinal
            seg = Segment(name, ordinal if name_totals[name] > 1 else None)
            if child == node:
                found.append(SemanticPath(tuple(segments + [seg])))
                continue
            if snap.graph.is_composite(child) and child not in on_path:
                on_path.add(child)
                segments.append(seg)
                walk(child, on_path, segments)
                segments.pop()
                on_path.remove(child)

    walk(snap.root, {snap.root}, [])
    found.sort(key=lambda p: p.text())
    return found


# ---------------------------------------------------------------------------
# Directory view and page flattening
# ---------------------------------------------------------------------------

def list_directory(snap: Snapshot, path: SemanticPath) -> list[DirEntry]:
    node, _ = resolve_semantic(snap, path)
    if not snap.graph.is_composite(node):
        raise NotComposite(f"{node!r} is a cell, not a directory")
    name_totals: dict[str, int] = {}
    for (name, _, _) in snap.graph.children(node):
        name_totals[name] = name_totals.get(name, 0) + 1
    entries: list[DirEntry] = []
    name_seen: dict[str, int] = {}
    for (name, child, _) in snap.graph.children(node):
        ordinal = name_seen.get(name, 0) + 1
        name_seen[name] = ordinal
        segment = f"{name}[{ordinal}]" if name_totals[name] > 1 else name
        entries.append(DirEntry(segment, snap.node_kind(child), child))
    return entries


def iter_arranged_cells(snap: Snapshot, component: str) -> Iterator[str]:
    """Depth-first in-order cells of a composite, recursion-cut by simple
    paths. A cell referenced twice along distinct simple paths appears twice."""

    def walk(current: str, on_path: set[str]) -> Iterator[str]:
        for (_, child, _) in snap.graph.children(current):
            if snap.is_cell(child):
                yield child
            elif snap.graph.is_composite(child) and child not in on_path:
                on_path.add(child)
                yield from walk(child, on_path)
                on_path.remove(child)

    yield from walk(component, {component})
