"""Semantic paths, hierarchical paths, enumeration duality, recursion cuts."""

from __future__ import annotations

import random
import time

import pytest

from cellgraph.cellstore import Cell
from cellgraph.errors import (
    Ambiguous,
    IndexOutOfRange,
    NoSuchSegment,
    NotComposite,
    UnknownNode,
)
from cellgraph.graph import Component
from cellgraph.markup import para, text
from cellgraph.namespace import (
    SemanticPath,
    enumerate_paths,
    hierarchical_path,
    iter_arranged_cells,
    list_directory,
    resolve_hierarchical,
    resolve_semantic,
)
from cellgraph.snapshot import Snapshot


def snap_with(*components: str, cells: tuple[str, ...] = ()) -> Snapshot:
    snap = Snapshot.create(root="x-root")
    for comp in components:
        snap.graph.add_component(Component(comp, "page"))
    for cell_id in cells:
        snap.cells.put(Cell(cell_id, "paragraph", para(text(cell_id))))
    return snap


class TestPathText:
    def test_parse_and_text(self):
        path = SemanticPath.parse("/course/intro/paragraph[2]")
        assert [s.name for s in path.segments] == ["course", "intro", "paragraph"]
        assert path.segments[2].index == 2
        assert path.text() == "/course/intro/paragraph[2]"

    def test_root(self):
        assert SemanticPath.parse("/").segments == ()
        assert SemanticPath(()).text() == "/"

    def test_rejects_relative(self):
        with pytest.raises(NoSuchSegment):
            SemanticPath.parse("course/intro")

    def test_rejects_zero_index(self):
        with pytest.raises(NoSuchSegment):
            SemanticPath.parse("/a[0]")


class TestResolve:
    def test_root_resolves_to_root(self):
        snap = snap_with()
        node, chain = resolve_semantic(snap, SemanticPath.parse("/"))
        assert node == "x-root"
        assert chain == ()

    def test_walk_and_context(self):
        snap = snap_with("x-page", cells=("c-a",))
        r1 = snap.graph.add_relation("x-root", "page", "x-page")
        r2 = snap.graph.add_relation("x-page", "paragraph", "c-a")
        node, chain = resolve_semantic(snap, SemanticPath.parse("/page/paragraph"))
        assert node == "c-a"
        assert [(l.component, l.relation) for l in chain] == [
            ("x-root", r1.id),
            ("x-page", r2.id),
        ]
        # the chain's last relation lands on the resolved node
        assert snap.graph.relation(chain[-1].relation).child == node

    def test_ambiguous_two_children(self):
        snap = snap_with(cells=("c-a", "c-b"))
        snap.graph.add_relation("x-root", "paragraph", "c-a")
        snap.graph.add_relation("x-root", "paragraph", "c-b")
        with pytest.raises(Ambiguous) as err:
            resolve_semantic(snap, SemanticPath.parse("/paragraph"))
        assert err.value.candidates == 2
        node, _ = resolve_semantic(snap, SemanticPath.parse("/paragraph[2]"))
        assert node == "c-b"

    def test_missing_segment(self):
        snap = snap_with()
        with pytest.raises(NoSuchSegment) as err:
            resolve_semantic(snap, SemanticPath.parse("/ghost"))
        assert err.value.candidates == 0

    def test_index_out_of_range(self):
        snap = snap_with(cells=("c-a",))
        snap.graph.add_relation("x-root", "paragraph", "c-a")
        with pytest.raises(IndexOutOfRange):
            resolve_semantic(snap, SemanticPath.parse("/paragraph[2]"))

    def test_walking_through_cell_fails(self):
        snap = snap_with(cells=("c-a",))
        snap.graph.add_relation("x-root", "paragraph", "c-a")
        with pytest.raises(NoSuchSegment):
            resolve_semantic(snap, SemanticPath.parse("/paragraph/deeper"))


class TestHierarchical:
    def test_unique_walk(self):
        snap = snap_with("x-course", "x-page")
        snap.graph.add_relation("x-root", "course", "x-course", hierarchical=True)
        snap.graph.add_relation("x-course", "intro", "x-page", hierarchical=True)
        assert resolve_hierarchical(snap, "/course/intro") == "x-page"
        assert hierarchical_path(snap, "x-page") == ["course", "intro"]

    def test_non_hierarchical_invisible(self):
        snap = snap_with("x-page")
        snap.graph.add_relation("x-root", "page", "x-page", hierarchical=False)
        with pytest.raises(NoSuchSegment):
            resolve_hierarchical(snap, "/page")
        assert hierarchical_path(snap, "x-page") is None

    def test_round_trip_from_forest(self):
        snap = snap_with("x-a", "x-b", "x-c")
        snap.graph.add_relation("x-root", "a", "x-a", hierarchical=True)
        snap.graph.add_relation("x-a", "b", "x-b", hierarchical=True)
        snap.graph.add_relation("x-b", "c", "x-c", hierarchical=True)
        for node in ("x-a", "x-b", "x-c"):
            labels = hierarchical_path(snap, node)
            assert labels is not None
            assert resolve_hierarchical(snap, "/" + "/".join(labels)) == node


class TestListDirectory:
    def test_duplicate_names_get_indices(self):
        snap = snap_with(cells=("c-a", "c-b", "c-t"))
        snap.cells.put(Cell("c-t", "title", "T"))
        snap.graph.add_relation("x-root", "paragraph", "c-a")
        snap.graph.add_relation("x-root", "paragraph", "c-b")
        snap.graph.add_relation("x-root", "title", "c-t")
        entries = list_directory(snap, SemanticPath.parse("/"))
        assert [e.segment for e in entries] == ["paragraph[1]", "paragraph[2]", "title"]
        assert [e.kind for e in entries] == ["paragraph", "paragraph", "title"]

    def test_listing_a_cell_fails(self):
        snap = snap_with(cells=("c-a",))
        snap.graph.add_relation("x-root", "paragraph", "c-a")
        with pytest.raises(NotComposite):
            list_directory(snap, SemanticPath.parse("/paragraph"))


# ---------------------------------------------------------------------------
# Enumeration against an independent exhaustive oracle
# ---------------------------------------------------------------------------

def oracle_simple_paths(snap: Snapshot, target: str, max_depth: int) -> set[str]:
    """Exhaustive simple-path search straight over raw relation records."""
    results: set[str] = set()
    if target == snap.root:
        results.add("/")

    def segment_text(parent: str, rel_id: str) -> str:
        rel = snap.graph.relation(rel_id)
        same_name = [
            rid for (name, _, rid) in snap.graph.children(parent) if name == rel.name
        ]
        if len(same_name) == 1:
            return rel.name
        return f"{rel.name}[{same_name.index(rel_id) + 1}]"

    def search(node: str, visited: frozenset[str], segs: tuple[str, ...]) -> None:
        if len(segs) >= max_depth:
            return
        for (name, child, rid) in snap.graph.children(node):
            seg = segment_text(node, rid)
            if child == target:
                results.add("/" + "/".join(segs + (seg,)))
            if (
                snap.graph.is_composite(child)
                and child not in visited
                and child != target
            ):
                search(child, visited | {child}, segs + (seg,))

    search(snap.root, frozenset({snap.root}), ())
    return results


def random_snapshot(rng: random.Random, n_comps: int, n_cells: int, cyclic: bool) -> Snapshot:
    snap = Snapshot.create(root="x-root")
    comps = ["x-root"] + [f"x-n{i}" for i in range(n_comps)]
    for comp in comps[1:]:
        snap.graph.add_component(Component(comp, "page"))
    cells = [f"c-n{i}" for i in range(n_cells)]
    for cell_id in cells:
        snap.cells.put(Cell(cell_id, "paragraph", para(text(cell_id))))
    names = ["paragraph", "section", "item"]
    for comp in comps:
        for _ in range(rng.randint(0, 5)):
            child = rng.choice(comps[1:] + cells)
            if child != comp:
                snap.graph.add_relation(comp, rng.choice(names), child)
    if cyclic and n_comps >= 2:
        a, b = rng.sample(comps[1:], 2)
        snap.graph.add_relation(a, "loop", b)
        snap.graph.add_relation(b, "loop", a)
    return snap


def test_enumerate_matches_oracle_small_graphs():
    rng = random.Random(31337)
    for round_no in range(60):
        snap = random_snapshot(rng, rng.randint(1, 6), rng.randint(1, 5), round_no % 5 == 0)
        nodes = snap.graph.component_ids() + snap.cells.ids()
        for node in nodes:
            got = {p.text() for p in enumerate_paths(snap, node, max_depth=6)}
            assert got == oracle_simple_paths(snap, node, 6), node


def test_every_enumerated_path_resolves_back():
    rng = random.Random(808)
    for _ in range(30):
        snap = random_snapshot(rng, rng.randint(2, 10), rng.randint(1, 8), rng.random() < 0.3)
        for node in snap.graph.component_ids() + snap.cells.ids():
            for path in enumerate_paths(snap, node, max_depth=8):
                resolved, chain = resolve_semantic(snap, path)
                assert resolved == node
                if path.segments:
                    assert snap.graph.relation(chain[-1].relation).child == node


def test_unreachable_node_has_no_paths():
    snap = snap_with("x-island")
    assert enumerate_paths(snap, "x-island") == []


def test_unknown_node_rejected():
    snap = snap_with()
    with pytest.raises(UnknownNode):
        enumerate_paths(snap, "x-ghost")


def test_cyclic_enumeration_terminates():
    snap = snap_with("x-a", "x-b", cells=("c-leaf",))
    snap.graph.add_relation("x-root", "a", "x-a")
    snap.graph.add_relation("x-a", "b", "x-b")
    snap.graph.add_relation("x-b", "a", "x-a")  # cycle a <-> b
    snap.graph.add_relation("x-b", "leaf", "c-leaf")
    begin = time.perf_counter()
    paths = enumerate_paths(snap, "c-leaf", max_depth=8)
    assert time.perf_counter() - begin < 2.0
    assert [p.text() for p in paths] == ["/a/b/leaf"]


def test_arranged_cells_respects_simple_path_cut():
    snap = snap_with("x-a", "x-b", cells=("c-1", "c-2"))
    snap.graph.add_relation("x-root", "a", "x-a")
    snap.graph.add_relation("x-a", "own", "c-1")
    snap.graph.add_relation("x-a", "b", "x-b")
    snap.graph.add_relation("x-b", "back", "x-a")  # recursion
    snap.graph.add_relation("x-b", "own", "c-2")
    assert list(iter_arranged_cells(snap, "x-a")) == ["c-1", "c-2"]


def test_shared_cell_listed_once_per_route():
    snap = snap_with("x-a", "x-b", cells=("c-shared",))
    snap.graph.add_relation("x-root", "a", "x-a")
    snap.graph.add_relation("x-root", "b", "x-b")
    snap.graph.add_relation("x-a", "p", "c-shared")
    snap.graph.add_relation("x-b", "p", "c-shared")
    assert list(iter_arranged_cells(snap, "x-root")) == ["c-shared", "c-shared"]
