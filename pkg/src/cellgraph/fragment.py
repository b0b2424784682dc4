"""Sub-cell addressing: selectors that pick word spans inside one cell.

The atomic addressable unit is the word, a maximal non-whitespace run.
Element boundaries count as word boundaries, so markup can never split a
word and spans survive re-serialization (byte offsets would not).

Three selector forms:

    all(KIND)          one span per em/kw/term/cite node that carries text
    words(A..B)        the word range A..B, silently clamped to the cell
    node(/tag[i]/...)  the span of one addressed element

A selector that matches nothing yields an empty list, never an error;
dynamic linking has to tolerate non-matching cells silently.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .cellstore import Cell
from .errors import BadNodePath, BadSelector
from .markup import Inline, INLINE_KINDS

_WS_SPLIT = re.compile(r"(\s+)")


@dataclass(frozen=True)
class FragmentSelector:
    """Parsed selector. ``mode`` is one of all/words/node."""

    mode: str
    kind: str = ""                                   # all(...)
    start: int = 0                                   # words(...)
    end: int = 0
    steps: tuple[tuple[str, int | None], ...] = ()   # node(...)


@dataclass(frozen=True)
class FragmentSpan:
    cell: str
    start_word: int
    end_word: int
    node_path: tuple[tuple[str, int], ...] | None = None


def all_of(kind: str) -> FragmentSelector:
    return FragmentSelector("all", kind=kind)


def words(a: int, b: int) -> FragmentSelector:
    return FragmentSelector("words", start=a, end=b)


def node(*steps: tuple[str, int | None]) -> FragmentSelector:
    return FragmentSelector("node", steps=tuple(steps))


# ---------------------------------------------------------------------------
# Selector text form
# ---------------------------------------------------------------------------

_ALL_RE = re.compile(r"^all\(([a-z]+)\)$")
_WORDS_RE = re.compile(r"^words\((\d+)\.\.(\d+)\)$")
_NODE_RE = re.compile(r"^node\((/[^)]*)\)$")
_STEP_RE = re.compile(r"^([a-z]+)(?:\[([1-9][0-9]*)\])?$")


def parse_selector(text: str) -> FragmentSelector:
    m = _ALL_RE.match(text)
    if m:
        if m.group(1) not in INLINE_KINDS:
            raise BadSelector(f"unknown inline kind {m.group(1)!r}", offset=4)
        return all_of(m.group(1))
    m = _WORDS_RE.match(text)
    if m:
        a, b = int(m.group(1)), int(m.group(2))
        if a < 1:
            raise BadSelector("word ordinals are 1-based", offset=6)
        if a > b:
            raise BadSelector(f"descending range {a}..{b}", offset=6)
        return words(a, b)
    m = _NODE_RE.match(text)
    if m:
        raw = m.group(1)
        steps: list[tuple[str, int | None]] = []
        for part in raw.lstrip("/").split("/"):
            sm = _STEP_RE.match(part)
            if not sm or sm.group(1) not in INLINE_KINDS:
                raise BadSelector(f"bad node step {part!r}", offset=text.find(part))
            steps.append((sm.group(1), int(sm.group(2)) if sm.group(2) else None))
        if not steps:
            raise BadSelector("node selector needs at least one step", offset=5)
        return node(*steps)
    raise BadSelector(f"unrecognized selector {text!r}", offset=0)


def format_selector(sel: FragmentSelector) -> str:
    if sel.mode == "all":
        return f"all({sel.kind})"
    if sel.mode == "words":
        return f"words({sel.start}..{sel.end})"
    parts = []
    for tag, idx in sel.steps:
        parts.append(f"{tag}[{idx}]" if idx is not None else tag)
    return "node(/" + "/".join(parts) + ")"


# ---------------------------------------------------------------------------
# Word enumeration
# ---------------------------------------------------------------------------

def text_words(value: str) -> list[str]:
    """Maximal non-whitespace runs, in order."""
    return [tok for tok in _WS_SPLIT.split(value) if tok and not tok.isspace()]


def cell_word_count(cell: Cell) -> int:
    if isinstance(cell.content, Inline):
        return _count_words(cell.content)
    return len(text_words(cell.content))


def _count_words(node: Inline) -> int:
    if node.kind == "text":
        return len(text_words(node.text))
    return sum(_count_words(c) for c in node.children)


def _node_ranges(
    tree: Inline,
) -> list[tuple[Inline, tuple[tuple[str, int], ...], int, int]]:
    """Document-order (node, path, first_word, last_word) for element nodes.

    Nodes without any text report last_word < first_word. Paths are
    (tag, index) steps where the index counts same-tag siblings, 1-based.
    """
    ordered: list[tuple[int, Inline, tuple[tuple[str, int], ...], int, int]] = []
    counter = [0]
    seq = [0]

    def walk(node: Inline, path: tuple[tuple[str, int], ...]) -> tuple[int, int]:
        first = counter[0] + 1
        tag_seen: dict[str, int] = {}
        for child in node.children:
            if child.kind == "text":
                counter[0] += len(text_words(child.text))
                continue
            ordinal = tag_seen.get(child.kind, 0) + 1
            tag_seen[child.kind] = ordinal
            child_path = path + ((child.kind, ordinal),)
            seq[0] += 1
            slot = seq[0]
            c_first, c_last = walk(child, child_path)
            ordered.append((slot, child, child_path, c_first, c_last))
        return first, counter[0]

    walk(tree, ())
    # Pre-order sequence numbers put enclosing nodes before their children.
    ordered.sort(key=lambda item: item[0])
    return [(n, p, f, l) for _, n, p, f, l in ordered]


# ---------------------------------------------------------------------------
# Resolution
# ---------------------------------------------------------------------------

def resolve_selector(sel: FragmentSelector, cell: Cell) -> list[FragmentSpan]:
    """Spans picked by ``sel`` inside ``cell``, non-partially-overlapping
    (nested or disjoint) and in document order."""
    if isinstance(cell.content, Inline):
        return _resolve_tree(sel, cell.id, cell.content)
    return _resolve_atom(sel, cell.id, cell.content)


def _resolve_atom(sel: FragmentSelector, cell_id: str, content: str) -> list[FragmentSpan]:
    if sel.mode == "node":
        raise BadNodePath("node selectors do not apply to atom cells")
    if sel.mode == "all":
        return []
    return _clip_words(sel, cell_id, len(text_words(content)))


def _clip_words(sel: FragmentSelector, cell_id: str, word_count: int) -> list[FragmentSpan]:
    start = max(sel.start, 1)
    end = min(sel.end, word_count)
    if start > end:
        return []
    return [FragmentSpan(cell_id, start, end)]


def _resolve_tree(sel: FragmentSelector, cell_id: str, tree: Inline) -> list[FragmentSpan]:
    if sel.mode == "words":
        return _clip_words(sel, cell_id, _count_words(tree))

    ranges = _node_ranges(tree)
    if sel.mode == "all":
        spans = []
        for node_, path, first, last in ranges:
            if node_.kind == sel.kind and last >= first:
                spans.append(FragmentSpan(cell_id, first, last, node_path=path))
        return spans

    # node(...): navigate the steps from the root.
    current = tree
    resolved: list[tuple[str, int]] = []
    for tag, idx in sel.steps:
        matches = [c for c in current.children if c.kind == tag]
        if not matches:
            raise BadNodePath(f"no <{tag}> under /{_format_steps(resolved)}")
        if idx is None:
            if len(matches) > 1:
                raise BadNodePath(
                    f"{len(matches)} <{tag}> elements under /{_format_steps(resolved)}, use {tag}[k]"
                )
            idx = 1
        if idx > len(matches):
            raise BadNodePath(f"only {len(matches)} <{tag}> elements, asked for [{idx}]")
        current = matches[idx - 1]
        resolved.append((tag, idx))
    for node_, path, first, last in ranges:
        if path == tuple(resolved):
            if last < first:
                return []
            return [FragmentSpan(cell_id, first, last, node_path=path)]
    return []


def _format_steps(steps: list[tuple[str, int]]) -> str:
    return "/".join(f"{tag}[{idx}]" for tag, idx in steps)
