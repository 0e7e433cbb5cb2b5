// DOM rendering: the panel is rebuilt from state on every change. The
// layout is two fixed columns; the panel column never moves or resizes,
// and every section renders even when empty so the geometry stays stable.

import type { PanelState } from "./state.js";

export interface Handlers {
  onClickLink(docId: string): void; // set rows only: rewards fitness + opens
  onOpenDoc(docId: string): void; // favorites/suggestions: open without reward
  onOpenInNewWindow(docId: string): void;
  onAddFavorite(docId: string): void;
  onRemoveFavorite(docId: string): void;
  onPauseToggle(): void;
  onReset(): void;
  onRefreshIntervalChange(secs: number): void;
}

function el(
  doc: Document,
  tag: string,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElement {
  const node = doc.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function renderPanel(
  doc: Document,
  root: HTMLElement,
  state: PanelState,
  handlers: Handlers,
): void {
  root.textContent = "";

  if (state.error) {
    root.appendChild(el(doc, "div", { class: "error-banner", "data-testid": "error" }, state.error));
  }

  // -- behaviour controls --------------------------------------------------
  const controls = el(doc, "section", { class: "controls", "data-testid": "controls" });
  const countdown = el(
    doc,
    "span",
    { class: "countdown", "data-testid": "countdown" },
    `${Math.ceil(state.secondsRemaining)}s`,
  );
  controls.appendChild(el(doc, "span", {}, "next refresh in "));
  controls.appendChild(countdown);

  const pause = el(
    doc,
    "button",
    { "data-testid": "pause", class: state.paused ? "active" : "" },
    state.paused ? "Resume" : "Pause",
  );
  pause.addEventListener("click", () => handlers.onPauseToggle());
  controls.appendChild(pause);

  const reset = el(doc, "button", { "data-testid": "reset" }, "Refresh");
  reset.addEventListener("click", () => handlers.onReset());
  controls.appendChild(reset);

  const interval = el(doc, "input", {
    type: "number",
    min: "1",
    max: "3600",
    value: String(state.refreshInterval),
    "data-testid": "refresh-interval",
  }) as HTMLInputElement;
  interval.addEventListener("change", () => {
    const secs = Number(interval.value);
    if (Number.isFinite(secs)) {
      handlers.onRefreshIntervalChange(secs);
    }
  });
  controls.appendChild(interval);
  root.appendChild(controls);

  // -- the set --------------------------------------------------------------
  const setSection = el(doc, "section", { class: "link-set", "data-testid": "set" });
  setSection.appendChild(el(doc, "h2", {}, "Links"));
  for (const entry of state.entries) {
    const row = el(doc, "div", { class: "set-row", "data-testid": "set-row", "data-doc": entry.doc_id });

    const open = el(doc, "button", { class: "open", title: "Open in a new window" }, "⧉");
    open.addEventListener("click", () => handlers.onOpenInNewWindow(entry.doc_id));
    row.appendChild(open);

    const favorite = el(doc, "button", { class: "favorite", title: "Add to Favorites", "data-testid": "add-favorite" }, "☆");
    favorite.addEventListener("click", () => handlers.onAddFavorite(entry.doc_id));
    row.appendChild(favorite);

    const link = el(doc, "a", { href: "#", class: "title", "data-testid": "link" }, entry.title);
    link.addEventListener("click", (event) => {
      event.preventDefault();
      handlers.onClickLink(entry.doc_id);
    });
    row.appendChild(link);

    row.appendChild(el(doc, "span", { class: "fitness", "data-testid": "fitness" }, String(entry.fitness)));
    setSection.appendChild(row);
  }
  root.appendChild(setSection);

  // -- favorites -------------------------------------------------------------
  const favSection = el(doc, "section", { class: "favorites", "data-testid": "favorites" });
  favSection.appendChild(el(doc, "h2", {}, "Favorites"));
  if (state.favorites.length === 0) {
    favSection.appendChild(el(doc, "p", { class: "empty" }, "nothing saved yet"));
  }
  for (const favorite of state.favorites) {
    const row = el(doc, "div", { class: "favorite-row", "data-testid": "favorite-row", "data-doc": favorite.doc_id });
    const link = el(doc, "a", { href: "#", class: "title" }, favorite.title);
    link.addEventListener("click", (event) => {
      event.preventDefault();
      handlers.onOpenDoc(favorite.doc_id);
    });
    row.appendChild(link);
    row.appendChild(el(doc, "span", { class: "held" }, `${Math.round(favorite.time_alive)}s`));
    const remove = el(doc, "button", { class: "remove", "data-testid": "remove-favorite" }, "✕");
    remove.addEventListener("click", () => handlers.onRemoveFavorite(favorite.doc_id));
    row.appendChild(remove);
    favSection.appendChild(row);
  }
  root.appendChild(favSection);

  // -- social suggestions -----------------------------------------------------
  const socialSection = el(doc, "section", { class: "suggestions", "data-testid": "suggestions" });
  socialSection.appendChild(el(doc, "h2", {}, "Social suggestions"));
  if (state.suggestions.length === 0) {
    socialSection.appendChild(el(doc, "p", { class: "empty" }, "no matching readers yet"));
  }
  for (const suggestion of state.suggestions) {
    const row = el(doc, "div", { class: "suggestion-row", "data-testid": "suggestion-row" });
    const link = el(doc, "a", { href: "#" }, suggestion.title);
    link.addEventListener("click", (event) => {
      event.preventDefault();
      handlers.onOpenDoc(suggestion.doc_id);
    });
    row.appendChild(link);
    row.appendChild(el(doc, "span", { class: "loi" }, suggestion.loi.toFixed(3)));
    socialSection.appendChild(row);
  }
  root.appendChild(socialSection);
}

export function renderContent(doc: Document, root: HTMLElement, state: PanelState): void {
  root.textContent = "";
  if (state.contentDoc === null) {
    root.appendChild(el(doc, "p", { class: "placeholder" }, "Pick a link to read a document."));
    return;
  }
  root.appendChild(el(doc, "h1", { "data-testid": "content-title" }, state.contentDoc.title));
  // plain text only: document bodies are rendered as text, never as markup
  const body = el(doc, "pre", { class: "doc-body", "data-testid": "content-body" });
  body.textContent = state.contentDoc.body;
  root.appendChild(body);
}
