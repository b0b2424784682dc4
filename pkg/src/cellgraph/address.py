"""Four-layer addressing: host / hierarchical path / context path / fragment.

    cell://HOST[/HIERPATH][#CONTEXTPATH][?FRAGMENT]

Note the deliberate inversion of web conventions: ``#`` introduces the
context (semantic) path, marking the switch into the context-sensitive name
space, and ``?`` carries the fragment selector. At least one of the two
paths must be present. The grammar ships in docs/address.abnf.

Only the "local" host dereferences; foreign hosts parse and format but
resolving them raises NotLocal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import (
    BadFragment,
    BadScheme,
    BadSegment,
    BadSelector,
    EmptyHost,
    FragmentOnComposite,
    NotLocal,
)
from .fragment import FragmentSelector, FragmentSpan, format_selector, parse_selector, resolve_selector
from .namespace import (
    ContextChain,
    SemanticPath,
    Segment,
    enumerate_paths,
    hierarchical_path,
    resolve_hierarchical,
    resolve_semantic,
)
from .snapshot import Snapshot

SCHEME = "cell://"
LOCAL_HOST = "local"

_HOST_RE = re.compile(r"^[a-z0-9]([a-z0-9.-]*[a-z0-9])?$")
_INDEX_SUFFIX_RE = re.compile(r"\[([1-9][0-9]*)\]$")
_UNRESERVED = set("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-._~")
_HEX = "0123456789ABCDEF"


@dataclass(frozen=True)
class Address:
    host: str
    hier: tuple[str, ...] | None = None
    context: SemanticPath | None = None
    fragment: FragmentSelector | None = None

    def hier_text(self) -> str | None:
        if self.hier is None:
            return None
        return "/" + "/".join(self.hier) if self.hier else "/"


# ---------------------------------------------------------------------------
# Percent encoding
# ---------------------------------------------------------------------------

def _pct_encode(segment: str) -> str:
    out = []
    for byte in segment.encode("utf-8"):
        char = chr(byte)
        if char in _UNRESERVED:
            out.append(char)
        else:
            out.append(f"%{_HEX[byte >> 4]}{_HEX[byte & 15]}")
    return "".join(out)


def _pct_decode(raw: str, base_offset: int) -> str:
    out = bytearray()
    i = 0
    while i < len(raw):
        c = raw[i]
        if c == "%":
            if not re.fullmatch(r"%[0-9A-Fa-f]{2}", raw[i:i + 3]):
                raise BadSegment("bad percent escape", offset=base_offset + i)
            out.extend(bytes([int(raw[i + 1:i + 3], 16)]))
            i += 3
        else:
            out.extend(c.encode("utf-8"))
            i += 1
    try:
        return out.decode("utf-8")
    except UnicodeDecodeError:
        raise BadSegment("escapes do not decode as UTF-8", offset=base_offset) from None


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def parse_uri(uri: str) -> Address:
    if not uri.startswith(SCHEME):
        raise BadScheme(f"expected {SCHEME}..., got {uri!r}", offset=0)
    i = len(SCHEME)
    host_start = i
    while i < len(uri) and uri[i] not in "/#?":
        i += 1
    host = uri[host_start:i]
    if not host:
        raise EmptyHost("address host is empty", offset=host_start)
    if not _HOST_RE.match(host):
        raise BadSegment(f"bad host {host!r}", offset=host_start)

    hier: tuple[str, ...] | None = None
    context: SemanticPath | None = None
    fragment: FragmentSelector | None = None

    if i < len(uri) and uri[i] == "/":
        part_start = i
        while i < len(uri) and uri[i] not in "#?":
            i += 1
        hier = _parse_hier(uri[part_start:i], part_start)

    if i < len(uri) and uri[i] == "#":
        i += 1
        part_start = i
        while i < len(uri) and uri[i] != "?":
            i += 1
        context = _parse_context(uri[part_start:i], part_start)

    if i < len(uri) and uri[i] == "?":
        i += 1
        rest = uri[i:]
        try:
            fragment = parse_selector(rest)
        except BadSelector as exc:
            raise BadFragment(
                exc.detail, offset=i + (exc.offset or 0)
            ) from None
        i = len(uri)

    if i != len(uri):
        raise BadSegment(f"unexpected {uri[i]!r}", offset=i)
    if hier is None and context is None:
        raise BadSegment("address needs a hierarchical or context path", offset=len(uri))
    return Address(host, hier, context, fragment)


def _parse_hier(raw: str, base: int) -> tuple[str, ...]:
    if raw == "/":
        return ()
    segments = []
    offset = base + 1
    for part in raw[1:].split("/"):
        if not part:
            raise BadSegment("empty path segment", offset=offset)
        if "[" in part or "]" in part:
            raise BadSegment(
                "hierarchical segments carry no [k] index (escape literal brackets)",
                offset=offset + part.find("[" if "[" in part else "]"),
            )
        segments.append(_pct_decode(part, offset))
        offset += len(part) + 1
    return tuple(segments)


def _parse_context(raw: str, base: int) -> SemanticPath:
    if not raw.startswith("/"):
        raise BadSegment("context path must start with '/'", offset=base)
    if raw == "/":
        return SemanticPath(())
    segments = []
    offset = base + 1
    for part in raw[1:].split("/"):
        if not part:
            raise BadSegment("empty path segment", offset=offset)
        index = None
        name_raw = part
        m = _INDEX_SUFFIX_RE.search(part)
        if m:
            index = int(m.group(1))
            name_raw = part[:m.start()]
        if "[" in name_raw or "]" in name_raw:
            raise BadSegment(
                "literal brackets in a segment name must be escaped",
                offset=offset + name_raw.find("[" if "[" in name_raw else "]"),
            )
        name = _pct_decode(name_raw, offset)
        if not name:
            raise BadSegment("empty segment name", offset=offset)
        segments.append(Segment(name, index))
        offset += len(part) + 1
    return SemanticPath(tuple(segments))


# ---------------------------------------------------------------------------
# Formatting
# ---------------------------------------------------------------------------

def format_uri(addr: Address) -> str:
    parts = [SCHEME, addr.host]
    if addr.hier is not None:
        parts.append("/" + "/".join(_pct_encode(s) for s in addr.hier) if addr.hier else "/")
    if addr.context is not None:
        segs = []
        for seg in addr.context.segments:
            text = _pct_encode(seg.name)
            if seg.index is not None:
                text += f"[{seg.index}]"
            segs.append(text)
        parts.append("#/" + "/".join(segs) if segs else "#/")
    if addr.fragment is not None:
        parts.append("?" + format_selector(addr.fragment))
    return "".join(parts)


# ---------------------------------------------------------------------------
# Dereferencing
# ---------------------------------------------------------------------------

def dereference(
    snap: Snapshot, addr: Address
) -> tuple[str, ContextChain, list[FragmentSpan] | None]:
    """Resolve an address to (node, context, spans).

    The context path wins when both paths are present: it carries context,
    while the hierarchical fallback arrives context-free. Fragments are
    evaluated against the resolved cell.
    """
    if addr.host != LOCAL_HOST:
        raise NotLocal(f"cannot dereference host {addr.host!r}")
    if addr.context is not None:
        node, chain = resolve_semantic(snap, addr.context)
    else:
        node = resolve_hierarchical(snap, addr.hier or ())
        chain = ()
    spans: list[FragmentSpan] | None = None
    if addr.fragment is not None:
        if not snap.is_cell(node):
            raise FragmentOnComposite(f"{node!r} is a composite; fragments address cells")
        spans = resolve_selector(addr.fragment, snap.cells.get(node))
    return node, chain, spans


def canonical_address(
    snap: Snapshot, node: str, span: FragmentSpan | None = None
) -> Address | None:
    """Preferred address of a node: its unique semantic path, else its
    hierarchical path, else the first enumerated semantic path (indexed).
    Returns None for nodes reachable no way at all."""
    fragment = None
    if span is not None:
        from .fragment import words

        fragment = words(span.start_word, span.end_word)
    paths = enumerate_paths(snap, node)
    if len(paths) == 1:
        return Address(LOCAL_HOST, context=paths[0], fragment=fragment)
    hier = hierarchical_path(snap, node)
    if hier is not None:
        return Address(LOCAL_HOST, hier=tuple(hier), fragment=fragment)
    if paths:
        return Address(LOCAL_HOST, context=paths[0], fragment=fragment)
    return None
