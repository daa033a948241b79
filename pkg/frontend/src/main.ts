/** Browser entry point: mounts the app against the API base URL, which is
 * the only configuration (?api=... overrides the default port). */

import { mount } from "./app.js";

const params = new URLSearchParams(window.location.search);
const apiBase = params.get("api") ?? "http://127.0.0.1:8237";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

mount(root, apiBase).catch((err) => {
  root.replaceChildren();
  const banner = document.createElement("div");
  banner.className = "ev-error-banner";
  banner.textContent = `Failed to load evidence map: ${err instanceof Error ? err.message : err}`;
  root.appendChild(banner);
});
