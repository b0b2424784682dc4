import { Client } from "./api.js";
import { boot, createApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const base = params.get("api") ?? "http://127.0.0.1:8040";

const root = document.querySelector<HTMLElement>("#app");
if (!root) throw new Error("#app missing from index.html");

void boot(createApp(root, new Client(base)));
