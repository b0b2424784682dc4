"""Evaluation of the three link layers against a content snapshot.

Anchors expand to concrete word spans, links pair source spans with
destination addresses, and link contexts decide which links decorate a
page. Everything here is pure over the snapshot: evaluation never touches
stored content, which is what keeps one content base re-linkable per
audience.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .address import Address, canonical_address
from .errors import BadNodePath, UnknownContext, UnknownPage
from .fragment import FragmentSpan, resolve_selector
from .linkbase import (
    AnchorDef,
    LinkDef,
    LinkContext,
    anchor_matches,
    cell_matches,
    rule_matches,
)
from .namespace import iter_arranged_cells
from .snapshot import Snapshot


@dataclass(frozen=True)
class LinkInstance:
    """One renderable link occurrence: a source span and where it leads.

    ``rule_index`` records which context rule admitted the link (lower wins
    overlap fights at render time); -1 until a context has spoken.
    """

    link: str
    source: FragmentSpan
    destinations: tuple[Address, ...]
    rule_index: int = -1


def eval_anchor(snap: Snapshot, anchor: AnchorDef) -> list[tuple[str, FragmentSpan]]:
    """Concrete (cell, span) pairs of an anchor, ordered by (cell, start).

    A dangling fixed target or a selector that does not apply evaluates to
    nothing; dynamic suballocation tolerates non-matching cells silently.
    """
    if anchor.target_cell is not None:
        if anchor.target_cell not in snap.cells:
            return []
        cell_ids = [anchor.target_cell]
    else:
        cell_ids = [
            cid
            for cid in snap.cells.ids()
            if cell_matches(snap.cells.get(cid), anchor.target_query or ())
        ]
    out: list[tuple[str, FragmentSpan]] = []
    for cid in cell_ids:
        try:
            spans = resolve_selector(anchor.selector, snap.cells.get(cid))
        except BadNodePath:
            continue
        out.extend((cid, span) for span in spans)
    return out


def _expand_endpoint(snap: Snapshot, spec) -> list[AnchorDef]:
    if spec.anchor is not None:
        found = snap.linkbase.anchors.get(spec.anchor)
        return [found] if found else []
    return [
        snap.linkbase.anchors[aid]
        for aid in snap.linkbase.anchor_ids()
        if anchor_matches(snap.linkbase.anchors[aid], spec.query or ())
    ]


def _span_key(span: FragmentSpan) -> tuple:
    # Link identity is the word range; how a selector picked it is not part
    # of the span's identity at the link layer.
    return (span.cell, span.start_word, span.end_word)


def eval_link(snap: Snapshot, link: LinkDef) -> list[LinkInstance]:
    """Expand a link into instances: one per source span, carrying every
    destination address except the span itself.

    Endpoint expansion is a union over matching anchors; sources and
    destinations cross-combine. A link whose endpoints expand to no source
    or no destination yields nothing (lint reports it, evaluation does not
    fail).
    """
    sources: dict[tuple, FragmentSpan] = {}
    dests: dict[tuple, FragmentSpan] = {}
    for spec in link.endpoints:
        for anchor in _expand_endpoint(snap, spec):
            for _, span in eval_anchor(snap, anchor):
                span = replace(span, node_path=None)
                if spec.source_capable:
                    sources.setdefault(_span_key(span), span)
                if spec.destination_capable:
                    dests.setdefault(_span_key(span), span)
    if not sources or not dests:
        return []
    dest_spans = [dests[k] for k in sorted(dests)]
    instances: list[LinkInstance] = []
    for skey in sorted(sources):
        source = sources[skey]
        addresses: list[Address] = []
        for dest in dest_spans:
            if _span_key(dest) == skey:
                continue
            addr = canonical_address(snap, dest.cell, span=dest)
            if addr is not None:
                addresses.append(addr)
        if addresses:
            instances.append(LinkInstance(link.id, source, tuple(addresses)))
    return instances


def context_fate(context: LinkContext, link: LinkDef) -> tuple[bool, int]:
    """(included, deciding rule index) after running the ordered rules.

    Links start excluded; each matching rule overrides the fate so far.
    """
    included = False
    deciding = -1
    for idx, rule in enumerate(context.rules):
        if not rule_matches(rule, link):
            continue
        if rule.op.startswith("include"):
            included = True
            deciding = idx
        else:
            included = False
            deciding = idx
    return included, deciding


def active_links(snap: Snapshot, context_id: str, page: str) -> list[LinkInstance]:
    """Instances a context activates on a page, ordered by (link, span).

    Only instances whose source span lies in a cell arranged on the page
    survive; the deciding rule index rides along for overlap resolution.
    """
    context = snap.contexts.get(context_id)
    if context is None:
        raise UnknownContext(f"no link context {context_id!r}")
    if not snap.graph.is_composite(page):
        raise UnknownPage(f"{page!r} is not a known composite")
    page_cells = set(iter_arranged_cells(snap, page))
    out: list[LinkInstance] = []
    for link_id in snap.linkbase.link_ids():
        link = snap.linkbase.links[link_id]
        included, rule_idx = context_fate(context, link)
        if not included:
            continue
        for instance in eval_link(snap, link):
            if instance.source.cell in page_cells:
                out.append(replace(instance, rule_index=rule_idx))
    out.sort(key=lambda i: (i.link, _span_key(i.source)))
    return out
