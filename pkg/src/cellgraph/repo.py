"""Repository: the single writer over all stores, plus disk persistence.

Layout of a repository directory:

    repo.json        {"root": ..., "name": ...}
    cells/<id>.json  {"id", "kind", "meta", "content"}  (canonical markup)
    graph.json       {"components": [...], "relations": [...]}
    linkbase.json    {"anchors": [...], "links": [...]}
    contexts.json    {"contexts": [...]}

Exports are byte-deterministic: keys sorted, fixed indentation, one
trailing newline, files written atomically. The revision counter is
runtime-only state; it starts at 0 on load and bumps exactly once per
accepted mutation.
"""

from __future__ import annotations

import json
import os
import threading
from contextlib import contextmanager
from pathlib import Path
from dataclasses import dataclass, field

from .cellstore import Cell, CellStore
from .errors import (
    CellGraphError,
    LoadError,
    NotFound,
    StillReferenced,
    UnknownNode,
    WriteError,
)
from .fragment import format_selector, parse_selector
from .graph import Component, Relation, RelationGraph
from .linkbase import (
    AnchorDef,
    Clause,
    Endpoint,
    LinkContext,
    LinkDef,
    Linkbase,
    Rule,
    anchor_problems,
    context_problems,
    link_problems,
)
from .markup import Inline, parse_paragraph
from .miracle import eval_link
from .namespace import enumerate_paths, hierarchical_path
from .snapshot import Snapshot


@dataclass
class LintFinding:
    severity: str  # "error" | "warning"
    code: str
    message: str
    subject: str = ""


@dataclass
class LintReport:
    findings: list[LintFinding] = field(default_factory=list)

    @property
    def errors(self) -> list[LintFinding]:
        return [f for f in self.findings if f.severity == "error"]

    @property
    def exit_code(self) -> int:
        return 1 if self.errors else 0


class _RWLock:
    """Write-preferring readers-writer lock; one writer, many readers."""

    def __init__(self) -> None:
        self._cond = threading.Condition()
        self._readers = 0
        self._writing = False
        self._writers_waiting = 0

    @contextmanager
    def read(self):
        with self._cond:
            while self._writing or self._writers_waiting:
                self._cond.wait()
            self._readers += 1
        try:
            yield
        finally:
            with self._cond:
                self._readers -= 1
                if self._readers == 0:
                    self._cond.notify_all()

    @contextmanager
    def write(self):
        with self._cond:
            self._writers_waiting += 1
            while self._writing or self._readers:
                self._cond.wait()
            self._writers_waiting -= 1
            self._writing = True
        try:
            yield
        finally:
            with self._cond:
                self._writing = False
                self._cond.notify_all()


class Repository:
    """Single-writer, multi-reader facade over one Snapshot.

    Mutators take the write side; readers that must see a committed
    snapshot (the HTTP layer) wrap their work in :meth:`reading`.
    """

    def __init__(self, snapshot: Snapshot):
        self.snap = snapshot
        self._revision = 0
        self._lock = _RWLock()

    @classmethod
    def create(cls, root: str = "x-root", name: str = "repo", root_kind: str = "site") -> Repository:
        return cls(Snapshot.create(root=root, name=name, root_kind=root_kind))

    @property
    def revision(self) -> int:
        return self._revision

    def _bump(self) -> None:
        self._revision += 1

    @contextmanager
    def reading(self):
        """A consistent read: no mutation is in flight while inside."""
        with self._lock.read():
            yield self.snap

    # --- mutations (serialized) ------------------------------------------

    def put_cell(self, cell: Cell) -> None:
        with self._lock.write():
            self.snap.cells.put(cell)
            self._bump()

    def delete_cell(self, cell_id: str) -> None:
        with self._lock.write():
            if cell_id not in self.snap.cells:
                raise NotFound(f"no cell {cell_id!r}")
            holders = [rel_id for (_, _, rel_id) in self.snap.graph.referrers(cell_id)]
            if holders:
                raise StillReferenced(
                    f"cell {cell_id!r} is referenced by {len(holders)} relation(s)",
                    relations=holders,
                )
            self.snap.cells.remove(cell_id)
            self._bump()

    def add_component(self, component: Component) -> None:
        with self._lock.write():
            self.snap.graph.add_component(component)
            self._bump()

    def add_relation(
        self,
        parent: str,
        name: str,
        child: str,
        position: int | None = None,
        hierarchical: bool = False,
    ) -> Relation:
        with self._lock.write():
            relation = self.snap.graph.add_relation(parent, name, child, position, hierarchical)
            self._bump()
            return relation

    def remove_relation(self, rel_id: str) -> None:
        with self._lock.write():
            self.snap.graph.remove_relation(rel_id)
            self._bump()

    def put_anchor(self, anchor: AnchorDef) -> None:
        with self._lock.write():
            self.snap.linkbase.put_anchor(anchor)
            self._bump()

    def put_link(self, link: LinkDef) -> None:
        with self._lock.write():
            self.snap.linkbase.put_link(link)
            self._bump()

    def put_context(self, context: LinkContext) -> None:
        with self._lock.write():
            problems = context_problems(context)
            if problems:
                raise LoadError("; ".join(problems))
            self.snap.contexts[context.id] = context
            self._bump()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Repository):
            return NotImplemented
        return self.snap == other.snap


# ---------------------------------------------------------------------------
# JSON forms
# ---------------------------------------------------------------------------

def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _write_atomic(path: Path, data: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    try:
        tmp.write_text(data, encoding="utf-8")
        os.replace(tmp, path)
    except OSError as exc:
        raise WriteError(f"cannot write {path}: {exc}") from exc


def cell_to_json(cell: Cell) -> dict:
    return {
        "id": cell.id,
        "kind": cell.kind,
        "meta": dict(sorted(cell.meta.items())),
        "content": cell.content_markup(),
    }


def cell_from_json(data: dict, origin: str) -> Cell:
    try:
        kind = data["kind"]
        content = data["content"]
        cell_id = data["id"]
    except (KeyError, TypeError) as exc:
        raise LoadError(f"{origin}: missing cell field {exc}") from None
    meta = data.get("meta", {})
    if kind == "paragraph":
        try:
            tree: Inline | str = parse_paragraph(content)
        except CellGraphError as exc:
            raise LoadError(f"{origin}: {exc.detail}") from None
    else:
        tree = content
    return Cell(cell_id, kind, tree, dict(meta))


def clauses_to_json(clauses) -> list[dict]:
    return [{"key": c.key, "value": c.value} for c in clauses]


def clauses_from_json(data, origin: str) -> tuple[Clause, ...]:
    try:
        return tuple(Clause(item["key"], item["value"]) for item in data)
    except (KeyError, TypeError):
        raise LoadError(f"{origin}: bad clause list") from None


def anchor_to_json(anchor: AnchorDef) -> dict:
    target: dict = (
        {"cell": anchor.target_cell}
        if anchor.target_cell is not None
        else {"query": clauses_to_json(anchor.target_query or ())}
    )
    return {
        "id": anchor.id,
        "target": target,
        "selector": format_selector(anchor.selector),
        "meta": dict(sorted(anchor.meta.items())),
    }


def anchor_from_json(data: dict, origin: str) -> AnchorDef:
    target = data.get("target", {})
    try:
        selector = parse_selector(data["selector"])
    except (KeyError, CellGraphError) as exc:
        raise LoadError(f"{origin}: bad anchor selector ({exc})") from None
    anchor = AnchorDef(
        id=data.get("id", ""),
        selector=selector,
        target_cell=target.get("cell"),
        target_query=(
            clauses_from_json(target["query"], origin) if "query" in target else None
        ),
        meta=dict(data.get("meta", {})),
    )
    problems = anchor_problems(anchor)
    if problems:
        raise LoadError(f"{origin}: {'; '.join(problems)}")
    return anchor


def link_to_json(link: LinkDef) -> dict:
    endpoints = []
    for ep in link.endpoints:
        item: dict = {"role": ep.role}
        if ep.anchor is not None:
            item["anchor"] = ep.anchor
        else:
            item["query"] = clauses_to_json(ep.query or ())
        endpoints.append(item)
    return {
        "id": link.id,
        "group": link.group,
        "endpoints": endpoints,
        "meta": dict(sorted(link.meta.items())),
    }


def link_from_json(data: dict, origin: str) -> LinkDef:
    endpoints = []
    for item in data.get("endpoints", []):
        endpoints.append(
            Endpoint(
                role=item.get("role", ""),
                anchor=item.get("anchor"),
                query=clauses_from_json(item["query"], origin) if "query" in item else None,
            )
        )
    link = LinkDef(
        id=data.get("id", ""),
        group=data.get("group", ""),
        endpoints=tuple(endpoints),
        meta=dict(data.get("meta", {})),
    )
    problems = link_problems(link)
    if problems:
        raise LoadError(f"{origin}: {'; '.join(problems)}")
    return link


def rule_to_json(rule: Rule) -> dict:
    item: dict = {"op": rule.op}
    if rule.group is not None:
        item["group"] = rule.group
    if rule.clauses is not None:
        item["clauses"] = clauses_to_json(rule.clauses)
    return item


def context_to_json(context: LinkContext) -> dict:
    return {
        "id": context.id,
        "name": context.name,
        "rules": [rule_to_json(r) for r in context.rules],
    }


def context_from_json(data: dict, origin: str) -> LinkContext:
    rules = []
    for item in data.get("rules", []):
        rules.append(
            Rule(
                op=item.get("op", ""),
                group=item.get("group"),
                clauses=(
                    clauses_from_json(item["clauses"], origin) if "clauses" in item else None
                ),
            )
        )
    context = LinkContext(
        id=data.get("id", ""), name=data.get("name", ""), rules=tuple(rules)
    )
    problems = context_problems(context)
    if problems:
        raise LoadError(f"{origin}: {'; '.join(problems)}")
    return context


# ---------------------------------------------------------------------------
# Export / import
# ---------------------------------------------------------------------------

def export_repo(repo: Repository, directory: str | Path) -> None:
    """Write the repository out; byte-identical for identical state."""
    snap = repo.snap
    base = Path(directory)
    cells_dir = base / "cells"
    try:
        cells_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise WriteError(f"cannot create {base}: {exc}") from exc

    _write_atomic(base / "repo.json", _dump({"root": snap.root, "name": snap.name}))

    components = [
        {"id": c.id, "kind": c.kind, "meta": dict(sorted(c.meta.items()))}
        for c in (snap.graph.component(cid) for cid in snap.graph.component_ids())
    ]
    relations = [
        {
            "id": r.id,
            "parent": r.parent,
            "name": r.name,
            "child": r.child,
            "position": r.position,
            "hierarchical": r.hierarchical,
        }
        for r in snap.graph.relations_sorted()
    ]
    _write_atomic(base / "graph.json", _dump({"components": components, "relations": relations}))

    _write_atomic(
        base / "linkbase.json",
        _dump(
            {
                "anchors": [anchor_to_json(snap.linkbase.anchors[a]) for a in snap.linkbase.anchor_ids()],
                "links": [link_to_json(snap.linkbase.links[l]) for l in snap.linkbase.link_ids()],
            }
        ),
    )
    _write_atomic(
        base / "contexts.json",
        _dump({"contexts": [context_to_json(snap.contexts[c]) for c in sorted(snap.contexts)]}),
    )

    wanted = set()
    for cell_id in snap.cells.ids():
        wanted.add(f"{cell_id}.json")
        _write_atomic(cells_dir / f"{cell_id}.json", _dump(cell_to_json(snap.cells.get(cell_id))))
    for stale in cells_dir.glob("*.json"):
        if stale.name not in wanted:
            stale.unlink()


def _read_json(path: Path):
    if not path.exists():
        raise LoadError(f"{path}: missing")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise LoadError(f"{path}: {exc}") from None


def import_repo(directory: str | Path) -> Repository:
    """Load a repository directory, validating referential integrity."""
    base = Path(directory)
    config = _read_json(base / "repo.json")
    root = config.get("root")
    name = config.get("name", "repo")
    if not root:
        raise LoadError(f"{base / 'repo.json'}: no root component configured")

    cells = CellStore()
    graph = RelationGraph(cell_exists=cells.__contains__)
    snap = Snapshot(cells, graph, Linkbase(), {}, root, name)

    cells_dir = base / "cells"
    if cells_dir.is_dir():
        for path in sorted(cells_dir.glob("*.json")):
            cell = cell_from_json(_read_json(path), str(path))
            if cell.id != path.stem:
                raise LoadError(f"{path}: cell id {cell.id!r} does not match filename")
            try:
                cells.put(cell)
            except CellGraphError as exc:
                raise LoadError(f"{path}: {exc.detail}") from None

    gdata = _read_json(base / "graph.json")
    for item in gdata.get("components", []):
        try:
            graph.add_component(Component(item["id"], item["kind"], dict(item.get("meta", {}))))
        except (KeyError, CellGraphError) as exc:
            raise LoadError(f"{base / 'graph.json'}: bad component ({exc})") from None
    for item in sorted(gdata.get("relations", []), key=lambda r: (r.get("parent", ""), r.get("position", 0))):
        try:
            graph.add_relation(
                item["parent"],
                item["name"],
                item["child"],
                position=None,  # positions are re-derived from sort order
                hierarchical=bool(item.get("hierarchical", False)),
                rel_id=item["id"],
            )
        except KeyError as exc:
            raise LoadError(f"{base / 'graph.json'}: relation missing field {exc}") from None
        except CellGraphError as exc:
            raise LoadError(
                f"{base / 'graph.json'}: relation {item.get('id')!r}: {exc.detail}"
            ) from None
    graph.resume_relation_counter()

    if not graph.is_composite(root):
        raise LoadError(f"{base / 'repo.json'}: root {root!r} is not a component")

    ldata = _read_json(base / "linkbase.json") if (base / "linkbase.json").exists() else {}
    for item in ldata.get("anchors", []):
        anchor = anchor_from_json(item, str(base / "linkbase.json"))
        snap.linkbase.anchors[anchor.id] = anchor
    for item in ldata.get("links", []):
        link = link_from_json(item, str(base / "linkbase.json"))
        snap.linkbase.links[link.id] = link

    cpath = base / "contexts.json"
    cdata = _read_json(cpath) if cpath.exists() else {}
    for item in cdata.get("contexts", []):
        context = context_from_json(item, str(cpath))
        snap.contexts[context.id] = context

    return Repository(snap)


# ---------------------------------------------------------------------------
# Lint
# ---------------------------------------------------------------------------

def lint(repo: Repository) -> LintReport:
    """Consistency report: cycles and dangling anchors warn (the engine
    tolerates them), broken structure errors."""
    snap = repo.snap
    report = LintReport()

    for cycle in snap.graph.find_cycles():
        report.findings.append(
            LintFinding("warning", "cycle", "relation cycle: " + " > ".join(cycle), cycle[0])
        )

    for anchor_id in snap.linkbase.anchor_ids():
        anchor = snap.linkbase.anchors[anchor_id]
        if anchor.target_cell is not None and anchor.target_cell not in snap.cells:
            report.findings.append(
                LintFinding(
                    "warning",
                    "dangling-anchor",
                    f"anchor {anchor_id!r} targets missing cell {anchor.target_cell!r}",
                    anchor_id,
                )
            )

    for link_id in snap.linkbase.link_ids():
        if not eval_link(snap, snap.linkbase.links[link_id]):
            report.findings.append(
                LintFinding(
                    "warning",
                    "empty-link",
                    f"link {link_id!r} expands to no instances",
                    link_id,
                )
            )

    reachable = {snap.root}
    stack = [snap.root]
    while stack:
        current = stack.pop()
        if not snap.graph.is_composite(current):
            continue
        for (_, child, _) in snap.graph.children(current):
            if child not in reachable:
                reachable.add(child)
                stack.append(child)
    for node in sorted(set(snap.graph.component_ids()) | set(snap.cells.ids())):
        if node not in reachable:
            report.findings.append(
                LintFinding("warning", "unreachable", f"{node!r} is unreachable from the root", node)
            )

    # Structural errors: cannot arise through the API, but imports of
    # hand-edited repositories go through here too.
    hier_parents: dict[str, list[str]] = {}
    for rel in snap.graph.relations_sorted():
        if not snap.graph.node_exists(rel.child) or not snap.graph.is_composite(rel.parent):
            report.findings.append(
                LintFinding("error", "dangling-relation", f"relation {rel.id!r} references a missing node", rel.id)
            )
        if rel.hierarchical:
            hier_parents.setdefault(rel.child, []).append(rel.id)
    for child, rels in hier_parents.items():
        if len(rels) > 1:
            report.findings.append(
                LintFinding(
                    "error",
                    "forest-violation",
                    f"{child!r} has {len(rels)} hierarchical parents",
                    child,
                )
            )
    cyclic_reported: set[frozenset[str]] = set()
    for comp_id in snap.graph.component_ids():
        seen: set[str] = set()
        cursor: str | None = comp_id
        while cursor is not None:
            if cursor in seen:
                members = frozenset(seen)
                if members not in cyclic_reported:
                    cyclic_reported.add(members)
                    report.findings.append(
                        LintFinding(
                            "error",
                            "forest-violation",
                            f"hierarchical cycle through {min(members)!r}",
                            min(members),
                        )
                    )
                break
            seen.add(cursor)
            up = snap.graph.hierarchical_parent(cursor)
            cursor = up.parent if up else None

    return report


def page_paths(repo: Repository, node: str) -> list[str]:
    """Convenience for tools: every semantic path text of a node."""
    return [p.text() for p in enumerate_paths(repo.snap, node)]
