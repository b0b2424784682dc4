"""JSON-over-HTTP facade for the engine.

Every response carries the repository revision in an X-Repo-Revision
header; error bodies are {error, detail, offset?} mirroring the module
error taxonomy. Payload schemas are documented in docs/api.md.
"""

from __future__ import annotations

from typing import Any

from fastapi import FastAPI, Request, Response
from fastapi.responses import HTMLResponse, JSONResponse

from . import address as addressing
from .cellstore import Cell
from .errors import (
    Ambiguous,
    BadFragment,
    BadNodePath,
    BadScheme,
    BadSegment,
    BadSelector,
    CellGraphError,
    EmptyHost,
    FragmentOnComposite,
    HierarchicalConflict,
    IndexOutOfRange,
    InvalidCell,
    InvalidLink,
    LoadError,
    MalformedMarkup,
    NoSuchSegment,
    NotComposite,
    NotFound,
    NotLocal,
    NotRenderable,
    PositionOutOfRange,
    SelfLoop,
    StillReferenced,
    UnknownContext,
    UnknownNode,
    UnknownPage,
    WriteError,
)
from .markup import Inline, parse_paragraph, serialize_paragraph
from .namespace import SemanticPath, list_directory
from .render import Block, RenderTree, assemble_page, emit_html, inject_links, render_plain_text
from .repo import (
    Repository,
    anchor_from_json,
    context_from_json,
    lint,
    link_from_json,
)

_STATUS: list[tuple[tuple[type[CellGraphError], ...], int]] = [
    ((NotFound, UnknownNode, NoSuchSegment, UnknownContext, UnknownPage, IndexOutOfRange), 404),
    (
        (
            MalformedMarkup,
            InvalidCell,
            InvalidLink,
            BadScheme,
            EmptyHost,
            BadSegment,
            BadFragment,
            BadSelector,
            BadNodePath,
            Ambiguous,
            NotComposite,
            NotRenderable,
            FragmentOnComposite,
            NotLocal,
        ),
        422,
    ),
    ((StillReferenced, HierarchicalConflict, SelfLoop, PositionOutOfRange), 409),
    ((LoadError, WriteError), 500),
]


def _status_for(exc: CellGraphError) -> int:
    for classes, status in _STATUS:
        if isinstance(exc, classes):
            return status
    return 500


def tree_to_json(node: Inline) -> dict[str, Any]:
    data: dict[str, Any] = {"kind": node.kind}
    if node.kind == "text":
        data["text"] = node.text
    elif node.kind == "cite":
        data["label"] = node.label
    else:
        data["children"] = [tree_to_json(c) for c in node.children]
    return data


def block_to_json(block: Block) -> dict[str, Any]:
    data: dict[str, Any] = {
        "cell": block.cell,
        "kind": block.kind,
        "text": block.text,
        "level": block.level,
        "decorations": [
            {
                "start_word": d.start_word,
                "end_word": d.end_word,
                "link": d.link,
                "destinations": [addressing.format_uri(a) for a in d.destinations],
            }
            for d in block.decorations
        ],
    }
    if block.tree is not None:
        data["tree"] = tree_to_json(block.tree)
        data["markup"] = serialize_paragraph(block.tree)
    return data


def rendertree_to_json(tree: RenderTree) -> dict[str, Any]:
    return {
        "v": 1,
        "page": tree.page,
        "context_path": tree.context_path.text(),
        "context": tree.context,
        "plain_text": render_plain_text(tree),
        "blocks": [block_to_json(b) for b in tree.blocks],
    }


def create_app(repo: Repository) -> FastAPI:
    app = FastAPI(title="cellgraph", docs_url=None, redoc_url=None)

    # The browser UI is served separately; the API is same-machine developer
    # tooling, so cross-origin reads/writes are open.
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["X-Repo-Revision"],
    )

    @app.exception_handler(CellGraphError)
    async def engine_error(request: Request, exc: CellGraphError) -> JSONResponse:
        return JSONResponse(
            status_code=_status_for(exc),
            content=exc.to_body(),
            headers={"X-Repo-Revision": str(repo.revision)},
        )

    @app.middleware("http")
    async def stamp_revision(request: Request, call_next):
        response = await call_next(request)
        response.headers.setdefault("X-Repo-Revision", str(repo.revision))
        return response

    # --- reads -----------------------------------------------------------

    @app.get("/api/repo")
    def repo_info() -> dict:
        return {"root": repo.snap.root, "name": repo.snap.name, "revision": repo.revision}

    @app.get("/api/resolve")
    def resolve(uri: str) -> dict:
        addr = addressing.parse_uri(uri)
        with repo.reading() as snap:
            node, chain, spans = addressing.dereference(snap, addr)
            return {
                "node": node,
                "kind": snap.node_kind(node),
                "context": [
                    {
                        "component": link.component,
                        "relation": link.relation,
                        "name": snap.graph.relation(link.relation).name,
                    }
                    for link in chain
                ],
                "spans": None
                if spans is None
                else [
                    {"cell": s.cell, "start_word": s.start_word, "end_word": s.end_word}
                    for s in spans
                ],
            }

    @app.get("/api/tree")
    def tree(path: str = "/") -> dict:
        with repo.reading() as snap:
            entries = list_directory(snap, SemanticPath.parse(path))
        return {
            "path": path,
            "entries": [
                {"segment": e.segment, "kind": e.kind, "node": e.node} for e in entries
            ],
        }

    @app.get("/api/page")
    def page(path: str, context: str | None = None, format: str = "json"):
        with repo.reading() as snap:
            rt = assemble_page(snap, SemanticPath.parse(path))
            if context is not None:
                rt = inject_links(snap, rt, context)
        if format == "html":
            return HTMLResponse(emit_html(rt), headers={"X-Repo-Revision": str(repo.revision)})
        return rendertree_to_json(rt)

    @app.get("/api/backrefs/{node_id}")
    def backrefs(node_id: str) -> dict:
        with repo.reading() as snap:
            refs = snap.graph.referrers(node_id)
        return {
            "node": node_id,
            "referrers": [
                {"parent": parent, "name": name, "relation": rel_id}
                for (parent, name, rel_id) in refs
            ],
        }

    @app.get("/api/contexts")
    def contexts() -> dict:
        with repo.reading() as snap:
            return {
                "contexts": [
                    {"id": c.id, "name": c.name}
                    for c in (snap.contexts[k] for k in sorted(snap.contexts))
                ]
            }

    @app.get("/api/cells/{cell_id}")
    def get_cell(cell_id: str) -> dict:
        with repo.reading() as snap:
            cell = snap.cells.get(cell_id)
        return {
            "id": cell.id,
            "kind": cell.kind,
            "meta": dict(sorted(cell.meta.items())),
            "content": cell.content_markup(),
        }

    @app.get("/api/lint")
    def lint_report() -> dict:
        with repo.reading():
            report = lint(repo)
        return {
            "findings": [
                {
                    "severity": f.severity,
                    "code": f.code,
                    "message": f.message,
                    "subject": f.subject,
                }
                for f in report.findings
            ],
            "exit_code": report.exit_code,
        }

    # --- mutations ----------------------------------------------------------

    @app.put("/api/cells/{cell_id}")
    async def put_cell(cell_id: str, request: Request) -> dict:
        payload = await request.json()
        kind = payload.get("kind", "paragraph")
        content = payload.get("content", "")
        if kind == "paragraph":
            content = parse_paragraph(content)
        created = cell_id not in repo.snap.cells
        repo.put_cell(Cell(cell_id, kind, content, dict(payload.get("meta", {}))))
        return {"id": cell_id, "created": created}

    @app.delete("/api/cells/{cell_id}")
    def delete_cell(cell_id: str) -> dict:
        repo.delete_cell(cell_id)
        return {"id": cell_id, "deleted": True}

    @app.post("/api/relations")
    async def add_relation(request: Request) -> dict:
        payload = await request.json()
        relation = repo.add_relation(
            payload["parent"],
            payload["name"],
            payload["child"],
            position=payload.get("position"),
            hierarchical=bool(payload.get("hierarchical", False)),
        )
        return {"id": relation.id, "position": relation.position}

    @app.delete("/api/relations/{rel_id}")
    def delete_relation(rel_id: str) -> dict:
        repo.remove_relation(rel_id)
        return {"id": rel_id, "deleted": True}

    @app.put("/api/anchors/{anchor_id}")
    async def put_anchor(anchor_id: str, request: Request) -> dict:
        payload = await request.json()
        payload["id"] = anchor_id
        try:
            anchor = anchor_from_json(payload, "request body")
        except LoadError as exc:
            raise InvalidLink(exc.detail) from None
        repo.put_anchor(anchor)
        return {"id": anchor_id}

    @app.put("/api/links/{link_id}")
    async def put_link(link_id: str, request: Request) -> dict:
        payload = await request.json()
        payload["id"] = link_id
        try:
            link = link_from_json(payload, "request body")
        except LoadError as exc:
            raise InvalidLink(exc.detail) from None
        repo.put_link(link)
        return {"id": link_id}

    @app.put("/api/contexts/{context_id}")
    async def put_context(context_id: str, request: Request) -> dict:
        payload = await request.json()
        payload["id"] = context_id
        try:
            context = context_from_json(payload, "request body")
        except LoadError as exc:
            raise InvalidLink(exc.detail) from None
        repo.put_context(context)
        return {"id": context_id}

    return app


def serve(repo_dir: str, port: int, host: str = "127.0.0.1") -> None:
    """Load a repository directory and serve it until interrupted."""
    import uvicorn

    from .repo import import_repo

    repo = import_repo(repo_dir)
    uvicorn.run(create_app(repo), host=host, port=port, log_level="info")
