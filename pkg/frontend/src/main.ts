// Browser bootstrap: mount the panel into the static page served at /ui.

import { PanelApp } from "./app.js";

function boot(): void {
  const panelRoot = document.getElementById("panel");
  const contentRoot = document.getElementById("content");
  if (!panelRoot || !contentRoot) {
    throw new Error("expected #panel and #content mount points");
  }
  const app = new PanelApp({
    document,
    panelRoot,
    contentRoot,
    fetchImpl: (input, init) => fetch(input, init),
    baseUrl: "",
    pollMs: 1000,
  });
  void app.start();
}

if (document.readyState === "loading") {
  document.addEventListener("DOMContentLoaded", boot);
} else {
  boot();
}
