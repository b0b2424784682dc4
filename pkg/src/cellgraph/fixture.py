"""The veterinary demo repository used by tests and the acceptance suite.

One course page on hamster diseases, written so that medical vocabulary is
tagged <kw> and disease names <term>. Supporting pages hold dictionary,
glossary and encyclopedia targets, and three link contexts re-link the same
page for three audiences:

    learner   every word points at the dictionary page
    farmer    medical keywords point at the glossary
    student   disease names point at the encyclopedia

The word-by-word linking is realized as one anchor per word position
(words(k..k) over paragraph cells, and over title atoms) because selectors
address one range at a time; the builder sizes the family to the longest
cell. Build it in memory with :func:`build_hamster`, or regenerate the
on-disk copy via ``python -m cellgraph.fixture <dir>``.
"""

from __future__ import annotations

import sys

from .cellstore import Cell
from .fragment import all_of, text_words, words
from .graph import Component
from .linkbase import AnchorDef, Clause, Endpoint, LinkContext, LinkDef, Rule
from .markup import parse_paragraph, plain_text
from .repo import Repository, export_repo

PARAGRAPHS = {
    "c-para-overview": (
        "<p>Hamsters suffer a range of ailments from <kw>dehydration</kw> "
        "to stress induced <term>colitis</term> in crowded cages.</p>"
    ),
    "c-para-wettail": "<p>a <kw>wet-tail</kw> case of <kw>enteritis</kw></p>",
    "c-para-care": (
        "<p>Clean bedding and fresh water reduce the risk of "
        "<term>wet-tail</term> for young hamsters.</p>"
    ),
    "c-dict-entry": "<p>dictionary entries for every common word</p>",
    "c-gloss-entry": "<p>glossary of veterinary terms</p>",
    "c-ency-entry": "<p>expert articles on hamster diseases</p>",
}

TITLES = {
    "c-title-intro": "Hamster Diseases",
    "c-title-dict": "Gaelic Dictionary",
    "c-title-gloss": "Medical Glossary",
    "c-title-ency": "Disease Encyclopedia",
    "c-title-care": "Daily Care",
}


def build_hamster() -> Repository:
    repo = Repository.create(root="x-site", name="hamster", root_kind="site")

    for cell_id, markup in PARAGRAPHS.items():
        repo.put_cell(Cell(cell_id, "paragraph", parse_paragraph(markup)))
    for cell_id, title in TITLES.items():
        repo.put_cell(Cell(cell_id, "title", title))

    repo.add_component(Component("x-course", "course"))
    for page_id in ("x-page-intro", "x-page-dict", "x-page-gloss", "x-page-ency", "x-page-care"):
        repo.add_component(Component(page_id, "page"))

    repo.add_relation("x-site", "course", "x-course", hierarchical=True)
    repo.add_relation("x-course", "intro", "x-page-intro", hierarchical=True)
    repo.add_relation("x-course", "dictionary", "x-page-dict", hierarchical=True)
    repo.add_relation("x-course", "glossary", "x-page-gloss", hierarchical=True)
    repo.add_relation("x-course", "encyclopedia", "x-page-ency", hierarchical=True)
    repo.add_relation("x-course", "care", "x-page-care", hierarchical=True)

    repo.add_relation("x-page-intro", "title", "c-title-intro")
    repo.add_relation("x-page-intro", "paragraph", "c-para-overview")
    repo.add_relation("x-page-intro", "paragraph", "c-para-wettail")
    repo.add_relation("x-page-intro", "paragraph", "c-para-care")

    repo.add_relation("x-page-dict", "title", "c-title-dict")
    repo.add_relation("x-page-dict", "paragraph", "c-dict-entry")
    repo.add_relation("x-page-gloss", "title", "c-title-gloss")
    repo.add_relation("x-page-gloss", "paragraph", "c-gloss-entry")
    repo.add_relation("x-page-ency", "title", "c-title-ency")
    repo.add_relation("x-page-ency", "paragraph", "c-ency-entry")

    repo.add_relation("x-page-care", "title", "c-title-care")
    # Shared cell: the care paragraph is arranged on two pages.
    repo.add_relation("x-page-care", "paragraph", "c-para-care")

    _build_linkbase(repo)
    _build_contexts(repo)
    return repo


def _build_linkbase(repo: Repository) -> None:
    longest_paragraph = max(
        len(text_words(plain_text(parse_paragraph(m)))) for m in PARAGRAPHS.values()
    )
    longest_title = max(len(text_words(t)) for t in TITLES.values())

    for k in range(1, longest_paragraph + 1):
        repo.put_anchor(
            AnchorDef(
                id=f"a-word-para-{k:02d}",
                selector=words(k, k),
                target_query=(Clause("kind", "paragraph"),),
                meta={"role": "word-src"},
            )
        )
    for k in range(1, longest_title + 1):
        repo.put_anchor(
            AnchorDef(
                id=f"a-word-title-{k:02d}",
                selector=words(k, k),
                target_query=(Clause("kind", "title"),),
                meta={"role": "word-src"},
            )
        )

    repo.put_anchor(
        AnchorDef(
            id="a-kw-src",
            selector=all_of("kw"),
            target_query=(Clause("kind", "paragraph"),),
            meta={"role": "kw-src"},
        )
    )
    repo.put_anchor(
        AnchorDef(
            id="a-term-src",
            selector=all_of("term"),
            target_query=(Clause("kind", "paragraph"),),
            meta={"role": "term-src"},
        )
    )
    repo.put_anchor(
        AnchorDef(id="a-dict-dest", selector=words(1, 1), target_cell="c-dict-entry")
    )
    repo.put_anchor(
        AnchorDef(id="a-gloss-dest", selector=words(1, 1), target_cell="c-gloss-entry")
    )
    repo.put_anchor(
        AnchorDef(id="a-ency-dest", selector=words(1, 1), target_cell="c-ency-entry")
    )

    repo.put_link(
        LinkDef(
            id="l-dict-words",
            group="dictionary",
            endpoints=(
                Endpoint("source", query=(Clause("meta.role", "word-src"),)),
                Endpoint("destination", anchor="a-dict-dest"),
            ),
        )
    )
    repo.put_link(
        LinkDef(
            id="l-glossary",
            group="glossary",
            endpoints=(
                Endpoint("source", anchor="a-kw-src"),
                Endpoint("destination", anchor="a-gloss-dest"),
            ),
        )
    )
    repo.put_link(
        LinkDef(
            id="l-encyclopedia",
            group="encyclopedia",
            endpoints=(
                Endpoint("source", anchor="a-term-src"),
                Endpoint("destination", anchor="a-ency-dest"),
            ),
        )
    )


def _build_contexts(repo: Repository) -> None:
    repo.put_context(
        LinkContext("learner", "Word-by-word dictionary", (Rule("include_group", group="dictionary"),))
    )
    repo.put_context(
        LinkContext("farmer", "Keyword glossary", (Rule("include_group", group="glossary"),))
    )
    repo.put_context(
        LinkContext("student", "Disease encyclopedia", (Rule("include_group", group="encyclopedia"),))
    )


def main(argv: list[str] | None = None) -> int:
    args = sys.argv[1:] if argv is None else argv
    if len(args) != 1:
        print("usage: python -m cellgraph.fixture <output-dir>", file=sys.stderr)
        return 2
    export_repo(build_hamster(), args[0])
    print(f"fixture written to {args[0]}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
