"""Inline paragraph markup: parser, canonical serializer and plain-text view.

The paragraph grammar is deliberately tiny:

    paragraph = "<p>" content "</p>"
    content   = (text | element)*
    element   = "<em>" content "</em>"
              | "<kw>" content "</kw>"
              | "<term>" content "</term>"
              | '<cite ref="' LABEL '"/>'
    text      = (CHAR | "&lt;" | "&gt;" | "&amp;")+   ; CHAR not in < > &
    LABEL     = one or more chars, none of " < > &

There is no element or attribute that can encode a link target; hyperlink
data lives in the linkbase and is injected at render time only.

Nesting is bounded: the root ``<p>`` counts as level 1 and no element may
sit deeper than level 4. Trees are normalized (adjacent text merged, empty
text dropped) and serialization is canonical: structurally equal trees
always produce byte-identical markup.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import MalformedMarkup

MAX_DEPTH = 4
CONTAINER_KINDS = ("em", "kw", "term")
INLINE_KINDS = CONTAINER_KINDS + ("cite",)

_LABEL_FORBIDDEN = set('"<>&')


@dataclass(frozen=True)
class Inline:
    """One node of a paragraph tree.

    ``kind`` is "p" for the root, "text" for character data, one of
    em/kw/term for containers, or "cite". Only text nodes use ``text``,
    only cite nodes use ``label``, only p/containers have ``children``.
    """

    kind: str
    text: str = ""
    label: str = ""
    children: tuple[Inline, ...] = field(default_factory=tuple)


# Small constructors so trees read naturally in fixtures and tests.

def text(value: str) -> Inline:
    return Inline("text", text=value)


def em(*children: Inline) -> Inline:
    return Inline("em", children=tuple(children))


def kw(*children: Inline) -> Inline:
    return Inline("kw", children=tuple(children))


def term(*children: Inline) -> Inline:
    return Inline("term", children=tuple(children))


def cite(label: str) -> Inline:
    return Inline("cite", label=label)


def para(*children: Inline) -> Inline:
    return Inline("p", children=tuple(children))


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

class _Parser:
    __slots__ = ("s", "i")

    def __init__(self, s: str):
        self.s = s
        self.i = 0

    def fail(self, msg: str, offset: int | None = None) -> MalformedMarkup:
        return MalformedMarkup(msg, offset=self.i if offset is None else offset)

    def expect(self, literal: str, msg: str) -> None:
        if not self.s.startswith(literal, self.i):
            raise self.fail(msg)
        self.i += len(literal)

    def parse(self) -> Inline:
        self.expect("<p>", "paragraph must open with <p>")
        children = self.parse_content(depth=1, closing="p")
        if self.i != len(self.s):
            raise self.fail("trailing data after </p>")
        return Inline("p", children=tuple(children))

    def parse_content(self, depth: int, closing: str) -> list[Inline]:
        s = self.s
        children: list[Inline] = []
        buf: list[str] = []

        def flush() -> None:
            if buf:
                children.append(Inline("text", text="".join(buf)))
                buf.clear()

        while True:
            if self.i >= len(s):
                raise self.fail(f"unclosed <{closing}>")
            c = s[self.i]
            if c == "<":
                if s.startswith("</", self.i):
                    flush()
                    end = s.find(">", self.i)
                    if end == -1:
                        raise self.fail("unterminated close tag")
                    name = s[self.i + 2:end]
                    if name != closing:
                        raise self.fail(f"mismatched close tag </{name}>, expected </{closing}>")
                    self.i = end + 1
                    return children
                flush()
                children.append(self.parse_element(depth))
            elif c == "&":
                buf.append(self.parse_entity())
            elif c == ">":
                raise self.fail("bare '>' must be written &gt;")
            else:
                start = self.i
                while self.i < len(s) and s[self.i] not in "<&>":
                    self.i += 1
                buf.append(s[start:self.i])

    def parse_element(self, depth: int) -> Inline:
        s = self.s
        at = self.i
        if depth + 1 > MAX_DEPTH:
            raise self.fail(f"element nested deeper than level {MAX_DEPTH}", offset=at)
        if s.startswith("<cite", self.i):
            return self.parse_cite()
        end = s.find(">", self.i)
        if end == -1:
            raise self.fail("unterminated open tag", offset=at)
        name = s[self.i + 1:end]
        if name not in CONTAINER_KINDS:
            raise self.fail(f"unknown element <{name}>", offset=at)
        self.i = end + 1
        children = self.parse_content(depth + 1, closing=name)
        return Inline(name, children=tuple(children))

    def parse_cite(self) -> Inline:
        at = self.i
        self.expect('<cite ref="', "cite element must be <cite ref=\"LABEL\"/>")
        s = self.s
        end = s.find('"', self.i)
        if end == -1:
            raise self.fail("unterminated cite label", offset=at)
        label = s[self.i:end]
        if not label:
            raise self.fail("cite label must be non-empty", offset=self.i)
        bad = _LABEL_FORBIDDEN.intersection(label)
        if bad:
            raise self.fail(f"cite label may not contain {sorted(bad)!r}", offset=self.i)
        self.i = end + 1
        self.expect("/>", "cite element must close with />")
        return Inline("cite", label=label)

    def parse_entity(self) -> str:
        s = self.s
        for entity, char in (("&lt;", "<"), ("&gt;", ">"), ("&amp;", "&")):
            if s.startswith(entity, self.i):
                self.i += len(entity)
                return char
        raise self.fail("unknown entity (only &lt; &gt; &amp; are recognized)")


def parse_paragraph(markup: str) -> Inline:
    """Parse canonical-or-hand-written markup into a normalized tree.

    Raises MalformedMarkup with the byte offset of the first problem.
    """
    return _Parser(markup).parse()


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def escape(value: str) -> str:
    return value.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def serialize_paragraph(tree: Inline) -> str:
    """Canonical byte form: no optional whitespace, double-quoted attributes."""
    return f"<p>{_serialize_children(tree.children)}</p>"


def _serialize_children(children: tuple[Inline, ...]) -> str:
    parts: list[str] = []
    for node in children:
        if node.kind == "text":
            parts.append(escape(node.text))
        elif node.kind == "cite":
            parts.append(f'<cite ref="{node.label}"/>')
        else:
            parts.append(f"<{node.kind}>{_serialize_children(node.children)}</{node.kind}>")
    return "".join(parts)


def plain_text(tree: Inline) -> str:
    """All text nodes in document order, markup dropped."""
    if tree.kind == "text":
        return tree.text
    return "".join(plain_text(child) for child in tree.children)


# ---------------------------------------------------------------------------
# Validation and normalization
# ---------------------------------------------------------------------------

def normalize(tree: Inline) -> Inline:
    """Merge adjacent text nodes and drop empty ones, recursively.

    Needed for trees assembled in code; parse output is normalized already.
    """
    if tree.kind in ("text", "cite"):
        return tree
    merged: list[Inline] = []
    for child in tree.children:
        child = normalize(child)
        if child.kind == "text":
            if not child.text:
                continue
            if merged and merged[-1].kind == "text":
                merged[-1] = Inline("text", text=merged[-1].text + child.text)
                continue
        merged.append(child)
    return Inline(tree.kind, children=tuple(merged))


def tree_problems(tree: Inline) -> list[str]:
    """Invariant violations of a paragraph tree, empty when valid."""
    problems: list[str] = []
    if tree.kind != "p":
        problems.append(f"root must be p, got {tree.kind}")
        return problems
    _check(tree, 1, problems)
    return problems


def _check(node: Inline, depth: int, problems: list[str]) -> None:
    if depth > MAX_DEPTH:
        problems.append(f"element <{node.kind}> nested deeper than level {MAX_DEPTH}")
        return
    if node.kind == "cite":
        if not node.label or _LABEL_FORBIDDEN.intersection(node.label):
            problems.append("cite label must be non-empty and free of \" < > &")
        if node.children or node.text:
            problems.append("cite nodes carry no text or children")
        return
    if node.kind == "text":
        problems.append("text node outside a container")
        return
    if node.kind != "p" and node.kind not in CONTAINER_KINDS:
        problems.append(f"unknown node kind {node.kind}")
        return
    prev_text = False
    for child in node.children:
        if child.kind == "text":
            if not child.text:
                problems.append("empty text node")
            if prev_text:
                problems.append("adjacent text nodes (tree not normalized)")
            prev_text = True
            if child.children or child.label:
                problems.append("text nodes carry no children or label")
        else:
            prev_text = False
            _check(child, depth + 1, problems)
