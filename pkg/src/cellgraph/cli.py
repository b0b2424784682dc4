"""Command line driver: serve, resolve, render, ls, backrefs, lint, export, import."""

from __future__ import annotations

import json
import sys

import click

from . import address as addressing
from .errors import CellGraphError
from .http import rendertree_to_json, serve
from .namespace import SemanticPath, list_directory
from .render import assemble_page, emit_html, inject_links
from .repo import export_repo, import_repo, lint as run_lint


def _load(repo_dir: str):
    return import_repo(repo_dir)


def _fail(exc: CellGraphError) -> None:
    click.echo(f"error: {exc.code}: {exc.detail}", err=True)
    sys.exit(1)


@click.group()
def main() -> None:
    """Hypermedia content engine over a cell repository."""


@main.command(name="serve")
@click.option("--repo", "repo_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--port", default=8040, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
def serve_cmd(repo_dir: str, port: int, host: str) -> None:
    """Serve the HTTP API for a repository."""
    serve(repo_dir, port, host)


@main.command()
@click.argument("uri")
@click.option("--repo", "repo_dir", required=True, type=click.Path(exists=True, file_okay=False))
def resolve(uri: str, repo_dir: str) -> None:
    """Dereference a cell:// URI and print what it addresses."""
    try:
        repo = _load(repo_dir)
        addr = addressing.parse_uri(uri)
        node, chain, spans = addressing.dereference(repo.snap, addr)
    except CellGraphError as exc:
        _fail(exc)
        return
    out = {
        "node": node,
        "kind": repo.snap.node_kind(node),
        "context": [
            {"component": link.component, "relation": link.relation} for link in chain
        ],
    }
    if spans is not None:
        out["spans"] = [
            {"cell": s.cell, "start_word": s.start_word, "end_word": s.end_word} for s in spans
        ]
    click.echo(json.dumps(out, indent=2, sort_keys=True))


@main.command()
@click.argument("path")
@click.option("--repo", "repo_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--context", "context_id", default=None, help="Link context to apply.")
@click.option("--format", "fmt", type=click.Choice(["json", "html"]), default="json", show_default=True)
def render(path: str, repo_dir: str, context_id: str | None, fmt: str) -> None:
    """Assemble a page, optionally inject a link context, and print it."""
    try:
        repo = _load(repo_dir)
        tree = assemble_page(repo.snap, SemanticPath.parse(path))
        if context_id is not None:
            tree = inject_links(repo.snap, tree, context_id)
    except CellGraphError as exc:
        _fail(exc)
        return
    if fmt == "html":
        click.echo(emit_html(tree))
    else:
        click.echo(json.dumps(rendertree_to_json(tree), indent=2, sort_keys=True))


@main.command()
@click.argument("path", default="/")
@click.option("--repo", "repo_dir", required=True, type=click.Path(exists=True, file_okay=False))
def ls(path: str, repo_dir: str) -> None:
    """List the directory view of a semantic path."""
    try:
        repo = _load(repo_dir)
        entries = list_directory(repo.snap, SemanticPath.parse(path))
    except CellGraphError as exc:
        _fail(exc)
        return
    for entry in entries:
        click.echo(f"{entry.segment}\t{entry.kind}\t{entry.node}")


@main.command()
@click.argument("node_id")
@click.option("--repo", "repo_dir", required=True, type=click.Path(exists=True, file_okay=False))
def backrefs(node_id: str, repo_dir: str) -> None:
    """Who references this component?"""
    try:
        repo = _load(repo_dir)
        refs = repo.snap.graph.referrers(node_id)
    except CellGraphError as exc:
        _fail(exc)
        return
    for (parent, name, rel_id) in refs:
        click.echo(f"{parent}\t{name}\t{rel_id}")


@main.command(name="lint")
@click.option("--repo", "repo_dir", required=True, type=click.Path(exists=True, file_okay=False))
def lint_cmd(repo_dir: str) -> None:
    """Check repository hygiene; exit nonzero on errors."""
    try:
        repo = _load(repo_dir)
    except CellGraphError as exc:
        _fail(exc)
        return
    report = run_lint(repo)
    for finding in report.findings:
        click.echo(f"{finding.severity}\t{finding.code}\t{finding.message}")
    if not report.findings:
        click.echo("clean")
    sys.exit(report.exit_code)


@main.command(name="export")
@click.argument("target", type=click.Path(file_okay=False))
@click.option("--repo", "repo_dir", required=True, type=click.Path(exists=True, file_okay=False))
def export_cmd(target: str, repo_dir: str) -> None:
    """Write a byte-deterministic copy of the repository."""
    try:
        export_repo(_load(repo_dir), target)
    except CellGraphError as exc:
        _fail(exc)
        return
    click.echo(f"exported to {target}")


@main.command(name="import")
@click.argument("source", type=click.Path(exists=True, file_okay=False))
@click.option("--repo", "repo_dir", required=True, type=click.Path(file_okay=False))
def import_cmd(source: str, repo_dir: str) -> None:
    """Validate a repository directory and copy it into place."""
    try:
        repo = import_repo(source)
        export_repo(repo, repo_dir)
    except CellGraphError as exc:
        _fail(exc)
        return
    click.echo(f"imported {source} -> {repo_dir}")


if __name__ == "__main__":
    main()
