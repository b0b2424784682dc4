// @vitest-environment jsdom
import { beforeEach, describe, expect, test } from "vitest";

import { Client } from "../src/api.js";
import {
  boot,
  createApp,
  navigate,
  openEditor,
  saveBuffer,
  select,
  switchContext,
  type App,
} from "../src/app.js";
import { bufferDirty } from "../src/state.js";
import { MockService } from "./mockService.js";

const BASE = "http://svc.test";

const PLAIN_HTML =
  '<article class="page" data-page="x-page-intro" data-context="">' +
  '<p data-cell="c-para-wettail">a wet-tail case of enteritis</p></article>';
const LEARNER_HTML =
  '<article class="page" data-page="x-page-intro" data-context="learner">' +
  '<p data-cell="c-para-wettail"><a href="cell://local#/d" data-link="l-dict">a</a> ' +
  '<a href="cell://local#/d" data-link="l-dict">wet-tail</a> ' +
  '<a href="cell://local#/d" data-link="l-dict">case</a> ' +
  '<a href="cell://local#/d" data-link="l-dict">of</a> ' +
  '<a href="cell://local#/d" data-link="l-dict">enteritis</a></p></article>';
const FARMER_HTML =
  '<article class="page" data-page="x-page-intro" data-context="farmer">' +
  '<p data-cell="c-para-wettail">a <a href="cell://local#/g" data-link="l-gloss">wet-tail</a> ' +
  'case of <a href="cell://local#/g" data-link="l-gloss">enteritis</a></p></article>';

let service: MockService;
let app: App;
let asked: string[];
let answer: boolean;

function setupRoutes(): void {
  service.json("GET", "/api/repo", { root: "x-site", name: "hamster", revision: 3 });
  service.json("GET", "/api/contexts", {
    contexts: [
      { id: "farmer", name: "Keyword glossary" },
      { id: "learner", name: "Word-by-word dictionary" },
    ],
  });
  service.json("GET", "/api/tree?path=%2F", {
    path: "/",
    entries: [{ segment: "course", kind: "course", node: "x-course" }],
  });
  service.json("GET", "/api/tree?path=%2Fcourse", {
    path: "/course",
    entries: [{ segment: "intro", kind: "page", node: "x-page-intro" }],
  });
  service.json("GET", "/api/tree?path=%2Fcourse%2Fintro", {
    path: "/course/intro",
    entries: [{ segment: "paragraph", kind: "paragraph", node: "c-para-wettail" }],
  });
  for (const path of ["%2F", "%2Fcourse"]) {
    service.json(
      "GET",
      `/api/page?path=${path}&format=html`,
      { error: "NotRenderable", detail: "not a page" },
      422,
    );
  }
  service.html("GET", "/api/page?path=%2Fcourse%2Fintro&format=html", PLAIN_HTML);
  service.html(
    "GET",
    "/api/page?path=%2Fcourse%2Fintro&context=learner&format=html",
    LEARNER_HTML,
  );
  service.html(
    "GET",
    "/api/page?path=%2Fcourse%2Fintro&context=farmer&format=html",
    FARMER_HTML,
  );
  service.json("GET", "/api/cells/c-para-wettail", {
    id: "c-para-wettail",
    kind: "paragraph",
    meta: {},
    content: "<p>a <kw>wet-tail</kw> case of <kw>enteritis</kw></p>",
  });
  service.json("GET", "/api/backrefs/c-para-wettail", {
    node: "c-para-wettail",
    referrers: [{ parent: "x-page-intro", name: "paragraph", relation: "r8" }],
  });
}

beforeEach(async () => {
  document.body.innerHTML = '<div id="app"></div>';
  service = new MockService();
  service.revision = 3;
  service.install(BASE);
  setupRoutes();
  asked = [];
  answer = true;
  app = createApp(document.querySelector("#app")!, new Client(BASE), (msg) => {
    asked.push(msg);
    return answer;
  });
  await boot(app);
});

describe("browse", () => {
  test("boot shows the site listing and contexts", () => {
    expect(select(app, "#repo-name").textContent).toBe("hamster");
    expect(select(app, "#tree-pane").textContent).toContain("course");
    const options = [...document.querySelectorAll<HTMLOptionElement>("#context-select option")];
    expect(options.map((o) => o.value)).toEqual(["", "farmer", "learner"]);
    expect(select(app, "#banner").hidden).toBe(true);
  });

  test("clicking down to a page renders exactly the served bytes", async () => {
    await navigate(app, "/course");
    await navigate(app, "/course/intro");
    // thin-client rule: the pane holds the service's HTML verbatim
    expect(select(app, "#page-pane").innerHTML).toBe(PLAIN_HTML);
  });

  test("non-page paths show a hint instead of a preview", async () => {
    await navigate(app, "/course");
    expect(select(app, "#page-pane").textContent).toContain("not a page");
  });

  test("unreachable service raises the banner, no crash", async () => {
    globalThis.fetch = (async () => {
      throw new TypeError("connection refused");
    }) as typeof fetch;
    const fresh = createApp(document.querySelector("#app")!, new Client(BASE), () => true);
    await boot(fresh);
    expect(select(fresh, "#banner").hidden).toBe(false);
    expect(select(fresh, "#banner").textContent).toContain("unreachable");
  });
});

describe("switch_context", () => {
  beforeEach(async () => {
    await navigate(app, "/course/intro");
  });

  test("text identical, decorations change", async () => {
    await switchContext(app, "learner");
    const learnerText = select(app, "#page-pane").textContent;
    const learnerLinks = select(app, "#page-pane").querySelectorAll("a").length;
    await switchContext(app, "farmer");
    const farmerText = select(app, "#page-pane").textContent;
    const farmerLinks = select(app, "#page-pane").querySelectorAll("a").length;
    expect(farmerText).toBe(learnerText);
    expect(learnerLinks).toBe(5);
    expect(farmerLinks).toBe(2);
  });

  test("issues only read requests", async () => {
    const mark = service.calls.length;
    await switchContext(app, "farmer");
    const methods = new Set(service.requestsSince(mark).map((c) => c.method));
    expect(methods).toEqual(new Set(["GET"]));
  });

  test("rapid toggling: last selection wins", async () => {
    let releaseLearner!: () => void;
    const gate = new Promise<void>((resolve) => {
      releaseLearner = resolve;
    });
    service.route("GET", "/api/page?path=%2Fcourse%2Fintro&context=learner&format=html", async () => {
      await gate;
      return service.respondHtml(LEARNER_HTML);
    });
    const slow = switchContext(app, "learner");
    const fast = switchContext(app, "farmer");
    await fast;
    releaseLearner();
    await slow;
    // the stale learner response must not overwrite the farmer render
    expect(select(app, "#page-pane").dataset.renderedContext).toBe("farmer");
    expect(select(app, "#page-pane").innerHTML).toBe(FARMER_HTML);
  });

  test("context removed server-side falls back to the plain view", async () => {
    service.json(
      "GET",
      "/api/page?path=%2Fcourse%2Fintro&context=ghost&format=html",
      { error: "UnknownContext", detail: "no link context 'ghost'" },
      404,
    );
    await switchContext(app, "ghost");
    expect(app.session.context).toBeNull();
    expect(select(app, "#page-pane").innerHTML).toBe(PLAIN_HTML);
  });

  test("switching never touches an unsaved buffer", async () => {
    await openEditor(app, "c-para-wettail");
    const textarea = select(app, "#editor-text") as HTMLTextAreaElement;
    textarea.value = "<p>edited</p>";
    textarea.dispatchEvent(new Event("input"));
    expect(bufferDirty(app.session)).toBe(true);
    await switchContext(app, "farmer");
    expect(asked).toEqual([]); // no discard prompt
    expect(app.session.buffer?.text).toBe("<p>edited</p>");
  });
});

describe("edit_cell", () => {
  beforeEach(async () => {
    await navigate(app, "/course/intro");
    await openEditor(app, "c-para-wettail");
  });

  function type(text: string): void {
    const textarea = select(app, "#editor-text") as HTMLTextAreaElement;
    textarea.value = text;
    textarea.dispatchEvent(new Event("input"));
  }

  test("save sends the buffer and refreshes the preview", async () => {
    service.json("PUT", "/api/cells/c-para-wettail", { id: "c-para-wettail", created: false });
    type("<p>a fixed typo</p>");
    const mark = service.calls.length;
    await saveBuffer(app);
    const put = service.requestsSince(mark).find((c) => c.method === "PUT");
    expect(put?.body).toEqual({ kind: "paragraph", content: "<p>a fixed typo</p>", meta: {} });
    const later = service.requestsSince(mark).map((c) => c.url);
    expect(later).toContain("/api/page?path=%2Fcourse%2Fintro&format=html");
    expect(select(app, "#editor-state").textContent).toBe("saved");
  });

  test("no-change save sends nothing", async () => {
    const mark = service.calls.length;
    await saveBuffer(app);
    expect(service.requestsSince(mark)).toEqual([]);
    expect(select(app, "#editor-state").textContent).toBe("no changes");
  });

  test("markup errors appear inline at the reported offset", async () => {
    service.json(
      "PUT",
      "/api/cells/c-para-wettail",
      { error: "MalformedMarkup", detail: "unclosed <p>", offset: 3 },
      422,
    );
    type("<p>broken");
    await saveBuffer(app);
    const errorBox = select(app, "#editor-error");
    expect(errorBox.hidden).toBe(false);
    expect(errorBox.textContent).toContain("MalformedMarkup");
    expect(errorBox.textContent).toContain("here");
    expect(bufferDirty(app.session)).toBe(true); // nothing lost
  });

  test("navigation away from a dirty buffer prompts, decline stays", async () => {
    type("<p>unsaved</p>");
    answer = false;
    await navigate(app, "/course");
    expect(asked.length).toBe(1);
    expect(app.session.path).toBe("/course/intro");
    expect(app.session.buffer?.text).toBe("<p>unsaved</p>");
  });

  test("stale revision with upstream edit offers a reload", async () => {
    type("<p>mine</p>");
    service.revision = 9;
    service.json("GET", "/api/repo", { root: "x-site", name: "hamster", revision: 9 });
    service.json("GET", "/api/cells/c-para-wettail", {
      id: "c-para-wettail",
      kind: "paragraph",
      meta: {},
      content: "<p>theirs</p>",
    });
    answer = false; // decline the reload
    const mark = service.calls.length;
    await saveBuffer(app);
    expect(asked[0]).toContain("changed on the server");
    expect(service.requestsSince(mark).some((c) => c.method === "PUT")).toBe(false);
  });
});
