"""Page assembly, link injection and HTML emission.

A page is nothing but an arrangement of cells; assembly flattens the
composite depth-first under the simple-path recursion cut. Injection maps
the active link instances of one context onto word ranges as decorations,
leaving the text bytes untouched, so the same assembled page reads
identically under every context and only its linking differs.

The HTML emitter is deterministic and whitespace-exact: stripping every tag
from its output yields the concatenated plain text of the blocks. Word
spans may cross inline-element boundaries, so one decoration can emit as
several <a> elements; nested decorations hand the inner words to the inner
link (anchors do not nest in HTML).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

from .address import Address, canonical_address, format_uri
from .cellstore import Cell
from .errors import NotRenderable, UnknownNode
from .fragment import text_words
from .markup import Inline, escape, plain_text
from .miracle import LinkInstance, active_links
from .namespace import SemanticPath, iter_arranged_cells, resolve_semantic
from .snapshot import Snapshot

RENDER_SCHEMA_VERSION = 1
RENDERABLE_KINDS = ("page", "section")

_TAG_MAP = {"em": "em", "kw": "mark", "term": "dfn"}


@dataclass(frozen=True)
class Decoration:
    start_word: int
    end_word: int
    destinations: tuple[Address, ...]
    link: str


@dataclass(frozen=True)
class Block:
    cell: str
    kind: str
    text: str
    tree: Inline | None = None
    decorations: tuple[Decoration, ...] = ()
    level: int = 0


@dataclass(frozen=True)
class RenderTree:
    page: str
    context_path: SemanticPath
    blocks: tuple[Block, ...]
    context: str | None = None


def render_plain_text(tree: RenderTree) -> str:
    """Concatenated block text; identical across link contexts by design."""
    return "".join(block.text for block in tree.blocks)


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------

def assemble_page(snap: Snapshot, path: SemanticPath) -> RenderTree:
    """Resolve a page path and flatten its arrangement into blocks."""
    node, _ = resolve_semantic(snap, path)
    if snap.is_cell(node):
        raise NotRenderable(f"{node!r} is a cell, not a page")
    kind = snap.graph.component(node).kind
    if kind not in RENDERABLE_KINDS:
        raise NotRenderable(f"{node!r} is a {kind}; only pages and sections render")
    blocks = []
    for cell_id in iter_arranged_cells(snap, node):
        blocks.append(_cell_block(snap.cells.get(cell_id)))
    return RenderTree(page=node, context_path=path, blocks=tuple(blocks))


def _cell_block(cell: Cell) -> Block:
    if isinstance(cell.content, Inline):
        return Block(cell.id, cell.kind, text=plain_text(cell.content), tree=cell.content)
    return Block(cell.id, cell.kind, text=cell.content)


# ---------------------------------------------------------------------------
# Link injection
# ---------------------------------------------------------------------------

def inject_links(snap: Snapshot, tree: RenderTree, context_id: str) -> RenderTree:
    """Recompute decorations for a context from scratch (idempotent).

    Partially overlapping spans cannot both render; the instance admitted
    by the earlier context rule wins, ties break on (link id, span), and
    losers are dropped. Nested or disjoint spans all survive.
    """
    instances = active_links(snap, context_id, tree.page)
    by_cell: dict[str, list[LinkInstance]] = {}
    for instance in instances:
        by_cell.setdefault(instance.source.cell, []).append(instance)
    blocks = []
    for block in tree.blocks:
        candidates = by_cell.get(block.cell, [])
        blocks.append(replace(block, decorations=_settle_overlaps(candidates)))
    return RenderTree(tree.page, tree.context_path, tuple(blocks), context=context_id)


def _compatible(a: LinkInstance, b: LinkInstance) -> bool:
    """Disjoint or properly nested (equal ranges count as nested)."""
    a1, a2 = a.source.start_word, a.source.end_word
    b1, b2 = b.source.start_word, b.source.end_word
    if a2 < b1 or b2 < a1:
        return True
    return (a1 <= b1 and b2 <= a2) or (b1 <= a1 and a2 <= b2)


def _settle_overlaps(candidates: list[LinkInstance]) -> tuple[Decoration, ...]:
    ranked = sorted(
        candidates,
        key=lambda i: (i.rule_index, i.link, i.source.start_word, i.source.end_word),
    )
    kept: list[LinkInstance] = []
    for candidate in ranked:
        if all(_compatible(candidate, other) for other in kept):
            kept.append(candidate)
    decorations = [
        Decoration(i.source.start_word, i.source.end_word, i.destinations, i.link)
        for i in kept
    ]
    decorations.sort(key=lambda d: (d.start_word, d.end_word))
    return tuple(decorations)


# ---------------------------------------------------------------------------
# Overview generation
# ---------------------------------------------------------------------------

def generate_overview(snap: Snapshot, root: str, depth: int) -> RenderTree:
    """Navigation tree over the composites reachable within ``depth``,
    labelled by their title atoms (falling back to the relation name) and
    linked to their canonical addresses."""
    if not snap.graph.is_composite(root):
        raise UnknownNode(f"no composite {root!r}")
    blocks: list[Block] = []

    def walk(current: str, level: int, on_path: set[str]) -> None:
        if level >= depth:
            return
        for (name, child, _) in snap.graph.children(current):
            if not snap.graph.is_composite(child) or child in on_path:
                continue
            label = _title_of(snap, child) or name
            address = canonical_address(snap, child)
            decorations: tuple[Decoration, ...] = ()
            if address is not None:
                decorations = (
                    Decoration(1, max(len(text_words(label)), 1), (address,), "nav"),
                )
            blocks.append(Block(child, "nav", text=label, decorations=decorations, level=level))
            on_path.add(child)
            walk(child, level + 1, on_path)
            on_path.remove(child)

    walk(root, 0, {root})
    return RenderTree(page=root, context_path=SemanticPath(()), blocks=tuple(blocks))


def _title_of(snap: Snapshot, composite: str) -> str | None:
    for (_, child, _) in snap.graph.children(composite):
        if snap.is_cell(child):
            cell = snap.cells.get(child)
            if cell.kind == "title" and isinstance(cell.content, str) and cell.content.strip():
                return cell.content
    return None


# ---------------------------------------------------------------------------
# HTML emission
# ---------------------------------------------------------------------------

def emit_html(tree: RenderTree) -> str:
    """Deterministic HTML5 fragment; tag-stripping it yields the plain text."""
    parts = [
        '<article class="page" data-page="%s" data-path="%s" data-context="%s">'
        % (
            escape_attr(tree.page),
            escape_attr(tree.context_path.text()),
            escape_attr(tree.context or ""),
        )
    ]
    for block in tree.blocks:
        parts.append(_emit_block(block))
    parts.append("</article>")
    return "".join(parts)


def escape_attr(value: str) -> str:
    return escape(value).replace('"', "&quot;")


def _emit_block(block: Block) -> str:
    if block.kind == "paragraph" and block.tree is not None:
        counter = [0]
        body = _emit_children(block.tree.children, block.decorations, counter)
        return f'<p data-cell="{escape_attr(block.cell)}">{body}</p>'
    if block.kind == "nav":
        body = _emit_text(block.text, block.decorations, [0])
        return (
            f'<div class="nav-entry" data-level="{block.level}" '
            f'data-cell="{escape_attr(block.cell)}">{body}</div>'
        )
    body = _emit_text(block.text, block.decorations, [0])
    if block.kind == "title":
        return f'<h2 class="atom atom-title" data-cell="{escape_attr(block.cell)}">{body}</h2>'
    return (
        f'<div class="atom atom-{block.kind}" data-cell="{escape_attr(block.cell)}">{body}</div>'
    )


def _emit_children(
    children: tuple[Inline, ...],
    decorations: tuple[Decoration, ...],
    counter: list[int],
) -> str:
    parts: list[str] = []
    for node in children:
        if node.kind == "text":
            parts.append(_emit_text(node.text, decorations, counter))
        elif node.kind == "cite":
            parts.append(f'<cite data-ref="{escape_attr(node.label)}"></cite>')
        else:
            tag = _TAG_MAP[node.kind]
            parts.append(f"<{tag}>{_emit_children(node.children, decorations, counter)}</{tag}>")
    return "".join(parts)


def _innermost(decorations: tuple[Decoration, ...], word: int) -> Decoration | None:
    covering = [d for d in decorations if d.start_word <= word <= d.end_word]
    if not covering:
        return None
    covering.sort(key=lambda d: (-d.start_word, d.end_word, d.link))
    return covering[0]


def _emit_text(
    value: str, decorations: tuple[Decoration, ...], counter: list[int]
) -> str:
    """Emit one text run, opening/closing anchors at word boundaries.

    Anchors never cross element boundaries: each text run closes its own
    anchor, so a span over words in different elements emits several <a>.
    Whitespace between two words of the same decoration stays inside it.
    """
    tokens = [t for t in re.split(r"(\s+)", value) if t]
    annotated: list[tuple[str, Decoration | None]] = []
    word_decos: list[Decoration | None] = []
    for token in tokens:
        if token.isspace():
            annotated.append((token, None))
        else:
            counter[0] += 1
            deco = _innermost(decorations, counter[0])
            annotated.append((token, deco))
            word_decos.append(deco)
    # Let whitespace join two words that share a decoration.
    word_at = [i for i, (t, _) in enumerate(annotated) if not t.isspace()]
    for pos, i in enumerate(word_at[:-1]):
        j = word_at[pos + 1]
        di, dj = annotated[i][1], annotated[j][1]
        if di is not None and di == dj:
            for k in range(i + 1, j):
                annotated[k] = (annotated[k][0], di)
    out: list[str] = []
    open_deco: Decoration | None = None
    for token, deco in annotated:
        if deco != open_deco:
            if open_deco is not None:
                out.append("</a>")
            if deco is not None:
                href = format_uri(deco.destinations[0]) if deco.destinations else ""
                out.append(
                    f'<a href="{escape_attr(href)}" data-link="{escape_attr(deco.link)}">'
                )
            open_deco = deco
        out.append(escape(token))
    if open_deco is not None:
        out.append("</a>")
    return "".join(out)
