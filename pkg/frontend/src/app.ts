// UI wiring: semantic tree on the left, server-rendered page previews in
// the middle, editor/backrefs on the right. Previews insert the service's
// HTML bytes verbatim; this file only moves data, it never builds content.

import { ApiError, Client } from "./api.js";
import {
  Session,
  bufferDirty,
  confirmDiscard,
  isCurrentSeq,
  newSession,
  nextPageSeq,
} from "./state.js";

export interface App {
  client: Client;
  session: Session;
  root: HTMLElement;
  ask: (msg: string) => boolean;
}

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const LAYOUT = `
  <header class="topbar">
    <span id="repo-name" class="repo-name"></span>
    <label>context
      <select id="context-select"><option value="">(none)</option></select>
    </label>
    <button id="pin-button" type="button">pin page</button>
    <span id="revision" class="revision"></span>
  </header>
  <div id="banner" class="banner" hidden></div>
  <div class="layout">
    <nav id="tree-pane" aria-label="semantic tree"></nav>
    <main class="previews">
      <section id="page-pane" class="preview"></section>
      <section id="pinned-pane" class="preview pinned" hidden></section>
    </main>
    <aside class="side">
      <div id="editor" hidden>
        <h3 id="editor-cell"></h3>
        <textarea id="editor-text" rows="6" spellcheck="false"></textarea>
        <div class="editor-actions">
          <button id="editor-save" type="button">save</button>
          <span id="editor-state"></span>
        </div>
        <pre id="editor-error" class="editor-error" hidden></pre>
      </div>
      <div id="backrefs"></div>
    </aside>
  </div>
`;

export function createApp(
  root: HTMLElement,
  client: Client,
  ask: (msg: string) => boolean = (msg) => window.confirm(msg),
): App {
  root.innerHTML = LAYOUT;
  const app: App = { client, session: newSession(), root, ask };

  select(app, "#context-select").addEventListener("change", () => {
    const value = (select(app, "#context-select") as HTMLSelectElement).value;
    void switchContext(app, value === "" ? null : value);
  });
  select(app, "#pin-button").addEventListener("click", () => togglePin(app));
  select(app, "#tree-pane").addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest("[data-path]");
    if (target) {
      event.preventDefault();
      void navigate(app, target.getAttribute("data-path")!);
    }
  });
  for (const paneId of ["#page-pane", "#pinned-pane"]) {
    select(app, paneId).addEventListener("click", (event) => {
      const cellNode = (event.target as HTMLElement).closest("[data-cell]");
      if (cellNode && !(event.target as HTMLElement).closest("a")) {
        void openEditor(app, cellNode.getAttribute("data-cell")!);
      }
    });
  }
  select(app, "#editor-save").addEventListener("click", () => void saveBuffer(app));
  select(app, "#editor-text").addEventListener("input", () => {
    if (app.session.buffer) {
      app.session.buffer.text = (select(app, "#editor-text") as HTMLTextAreaElement).value;
      renderEditorState(app);
    }
  });
  return app;
}

export function select(app: App, selector: string): HTMLElement {
  const found = app.root.querySelector<HTMLElement>(selector);
  if (!found) throw new Error(`missing ${selector}`);
  return found;
}

function banner(app: App, message: string | null): void {
  const node = select(app, "#banner");
  if (message === null) {
    node.hidden = true;
    node.textContent = "";
  } else {
    node.hidden = false;
    node.textContent = message;
  }
}

function showRevision(app: App): void {
  select(app, "#revision").textContent =
    app.client.revision === null ? "" : `rev ${app.client.revision}`;
}

// --- boot -----------------------------------------------------------------

export async function boot(app: App): Promise<void> {
  try {
    const info = await app.client.repoInfo();
    select(app, "#repo-name").textContent = info.name;
    const { contexts } = await app.client.contexts();
    const picker = select(app, "#context-select") as HTMLSelectElement;
    for (const ctx of contexts) {
      const option = document.createElement("option");
      option.value = ctx.id;
      option.textContent = `${ctx.id} (${ctx.name})`;
      picker.appendChild(option);
    }
    banner(app, null);
    await navigate(app, "/");
  } catch (error) {
    banner(app, `service unreachable: ${String(error)}`);
  }
}

// --- navigation and previews ---------------------------------------------

export async function navigate(app: App, path: string): Promise<void> {
  if (!confirmDiscard(app.session, app.ask)) return;
  app.session.path = path;
  closeEditor(app);
  try {
    await Promise.all([refreshTree(app), refreshPreviews(app)]);
    banner(app, null);
  } catch (error) {
    if (error instanceof ApiError) {
      banner(app, `${error.body.error}: ${error.body.detail}`);
    } else {
      banner(app, `service unreachable: ${String(error)}`);
    }
  }
  showRevision(app);
}

async function refreshTree(app: App): Promise<void> {
  const { entries } = await app.client.tree(app.session.path);
  const up =
    app.session.path === "/"
      ? ""
      : `<li><a href="#" data-path="${esc(parentPath(app.session.path))}">..</a></li>`;
  const items = entries
    .map((entry) => {
      const child =
        app.session.path === "/" ? `/${entry.segment}` : `${app.session.path}/${entry.segment}`;
      const marker = entry.kind === "paragraph" || entry.kind === "title" ? "·" : "▸";
      return `<li><a href="#" data-path="${esc(child)}">${marker} ${esc(entry.segment)}</a> <span class="kind">${esc(entry.kind)}</span></li>`;
    })
    .join("");
  select(app, "#tree-pane").innerHTML =
    `<div class="path">${esc(app.session.path)}</div><ul>${up}${items}</ul>`;
}

function parentPath(path: string): string {
  const cut = path.lastIndexOf("/");
  return cut <= 0 ? "/" : path.slice(0, cut);
}

/**
 * Re-fetch every visible preview for the current path/context. Responses
 * apply only while they are the latest request (last selection wins).
 */
export async function refreshPreviews(app: App): Promise<void> {
  const seq = nextPageSeq(app.session);
  const jobs: Promise<void>[] = [renderPreview(app, "#page-pane", app.session.path, seq)];
  if (app.session.pinnedPath !== null) {
    jobs.push(renderPreview(app, "#pinned-pane", app.session.pinnedPath, seq));
  }
  await Promise.all(jobs);
}

async function renderPreview(
  app: App,
  paneId: string,
  path: string,
  seq: number,
): Promise<void> {
  const pane = select(app, paneId);
  try {
    const html = await app.client.pageHtml(path, app.session.context);
    if (!isCurrentSeq(app.session, seq)) return; // a newer request won
    pane.innerHTML = html; // server bytes, verbatim
    pane.dataset.renderedContext = app.session.context ?? "";
    pane.dataset.renderedPath = path;
  } catch (error) {
    if (!isCurrentSeq(app.session, seq)) return;
    if (error instanceof ApiError && error.body.error === "NotRenderable") {
      pane.innerHTML = `<p class="note">${esc(path)} is not a page; pick a page to preview.</p>`;
    } else if (error instanceof ApiError && error.body.error === "UnknownContext") {
      // context vanished server-side: fall back to the undecorated view
      app.session.context = null;
      (select(app, "#context-select") as HTMLSelectElement).value = "";
      pane.innerHTML = await app.client.pageHtml(path, null);
    } else {
      throw error;
    }
  }
}

/** Context switching is read-only and never touches the edit buffer. */
export async function switchContext(app: App, context: string | null): Promise<void> {
  app.session.context = context;
  try {
    await refreshPreviews(app);
    banner(app, null);
  } catch (error) {
    banner(app, `context switch failed: ${String(error)}`);
  }
  showRevision(app);
}

function togglePin(app: App): void {
  if (app.session.pinnedPath === null) {
    app.session.pinnedPath = app.session.path;
    select(app, "#pin-button").textContent = "unpin";
    select(app, "#pinned-pane").hidden = false;
  } else {
    app.session.pinnedPath = null;
    select(app, "#pin-button").textContent = "pin page";
    const pane = select(app, "#pinned-pane");
    pane.hidden = true;
    pane.innerHTML = "";
  }
  void refreshPreviews(app);
}

// --- editing ----------------------------------------------------------------

export async function openEditor(app: App, cellId: string): Promise<void> {
  if (app.session.buffer?.cell !== cellId && !confirmDiscard(app.session, app.ask)) return;
  const cell = await app.client.cell(cellId);
  app.session.buffer = {
    cell: cellId,
    kind: cell.kind,
    original: cell.content,
    text: cell.content,
    revision: app.client.revision,
  };
  select(app, "#editor").hidden = false;
  select(app, "#editor-cell").textContent = `${cellId} (${cell.kind})`;
  (select(app, "#editor-text") as HTMLTextAreaElement).value = cell.content;
  showEditorError(app, null);
  renderEditorState(app);
}

function closeEditor(app: App): void {
  app.session.buffer = null;
  select(app, "#editor").hidden = true;
  showEditorError(app, null);
}

function renderEditorState(app: App): void {
  select(app, "#editor-state").textContent = bufferDirty(app.session) ? "unsaved" : "";
}

function showEditorError(app: App, message: string | null): void {
  const node = select(app, "#editor-error");
  if (message === null) {
    node.hidden = true;
    node.textContent = "";
  } else {
    node.hidden = false;
    node.textContent = message;
  }
}

export async function saveBuffer(app: App): Promise<void> {
  const buffer = app.session.buffer;
  if (!buffer) return;
  if (buffer.text === buffer.original) {
    showEditorError(app, null);
    select(app, "#editor-state").textContent = "no changes";
    return; // nothing to send, no revision bump
  }
  // Optimistic concurrency: if the repository moved on while we edited and
  // the cell itself changed, offer a reload instead of clobbering it.
  if (buffer.revision !== null) {
    const info = await app.client.repoInfo();
    if (info.revision !== buffer.revision) {
      const fresh = await app.client.cell(buffer.cell);
      if (fresh.content !== buffer.original) {
        if (app.ask(`${buffer.cell} changed on the server; reload it?`)) {
          await openEditor(app, buffer.cell);
        }
        return;
      }
      buffer.revision = info.revision;
    }
  }
  try {
    await app.client.putCell(buffer.cell, {
      kind: buffer.kind,
      content: buffer.text,
      meta: {},
    });
  } catch (error) {
    if (error instanceof ApiError && error.status === 422) {
      const offset = error.body.offset;
      const caret =
        offset === undefined
          ? ""
          : `\n${buffer.text.slice(0, offset)}↗ here ↖${buffer.text.slice(offset)}`;
      showEditorError(app, `${error.body.error}: ${error.body.detail}${caret}`);
      return;
    }
    throw error;
  }
  buffer.original = buffer.text;
  buffer.revision = app.client.revision;
  showEditorError(app, null);
  renderEditorState(app);
  select(app, "#editor-state").textContent = "saved";
  await refreshPreviews(app); // every visible page containing the cell updates
  await renderBackrefs(app, buffer.cell);
  showRevision(app);
}

async function renderBackrefs(app: App, cellId: string): Promise<void> {
  const { referrers } = await app.client.backrefs(cellId);
  const rows = referrers
    .map(
      (ref) =>
        `<li><code>${esc(ref.parent)}</code> via <code>${esc(ref.name)}</code> (${esc(ref.relation)})</li>`,
    )
    .join("");
  select(app, "#backrefs").innerHTML =
    `<h3>who references ${esc(cellId)}?</h3><ul>${rows || "<li>(nobody)</li>"}</ul>`;
}

export { renderBackrefs };
