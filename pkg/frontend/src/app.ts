// Application wiring: one poll loop, one countdown timer, and handlers
// that always re-render from the server's authoritative response. An
// in-flight guard per control prevents double submits; no fitness value
// is ever computed on the client.

import { ApiClient, type FetchLike } from "./api.js";
import {
  applyFavorites,
  applySetView,
  applySuggestions,
  countdownTick,
  initialState,
  type PanelState,
  showDocument,
  withError,
} from "./state.js";
import { type Handlers, renderContent, renderPanel } from "./render.js";

export interface AppOptions {
  document: Document;
  panelRoot: HTMLElement;
  contentRoot: HTMLElement;
  fetchImpl: FetchLike;
  baseUrl?: string;
  pollMs?: number;
  openWindow?: (url: string) => void;
}

export class PanelApp {
  readonly api: ApiClient;
  state: PanelState;
  private doc: Document;
  private panelRoot: HTMLElement;
  private contentRoot: HTMLElement;
  private pollMs: number;
  private openWindow: (url: string) => void;
  private inFlight = new Set<string>();
  private pollTimer: ReturnType<typeof setInterval> | null = null;
  private countdownTimer: ReturnType<typeof setInterval> | null = null;

  constructor(options: AppOptions) {
    this.api = new ApiClient(options.baseUrl ?? "", options.fetchImpl);
    this.doc = options.document;
    this.panelRoot = options.panelRoot;
    this.contentRoot = options.contentRoot;
    this.pollMs = options.pollMs ?? 1000;
    this.openWindow = options.openWindow ?? ((url) => window.open(url, "_blank"));
    this.state = initialState();
  }

  // -- lifecycle -----------------------------------------------------------

  async start(): Promise<void> {
    await this.pollOnce();
    this.pollTimer = setInterval(() => void this.pollOnce(), this.pollMs);
    this.countdownTimer = setInterval(() => {
      this.state = countdownTick(this.state);
      this.render();
    }, 1000);
  }

  stop(): void {
    if (this.pollTimer) clearInterval(this.pollTimer);
    if (this.countdownTimer) clearInterval(this.countdownTimer);
  }

  async pollOnce(): Promise<void> {
    try {
      // the set request goes first alone: on first contact it establishes
      // the session cookie that the parallel requests below must share
      const view = await this.api.getSet();
      const [favorites, suggestions] = await Promise.all([
        this.api.getFavorites(),
        this.api.getSuggestions(),
      ]);
      this.state = applySuggestions(
        applyFavorites(applySetView(this.state, view), favorites.favorites),
        suggestions.suggestions,
      );
    } catch (error) {
      this.state = withError(this.state, String(error));
    }
    this.render();
  }

  render(): void {
    renderPanel(this.doc, this.panelRoot, this.state, this.handlers());
    renderContent(this.doc, this.contentRoot, this.state);
  }

  // -- actions ----------------------------------------------------------------

  private async guarded(key: string, action: () => Promise<void>): Promise<void> {
    if (this.inFlight.has(key)) {
      return;
    }
    this.inFlight.add(key);
    try {
      await action();
    } catch (error) {
      this.state = withError(this.state, String(error));
    } finally {
      this.inFlight.delete(key);
    }
    this.render();
  }

  handlers(): Handlers {
    return {
      onClickLink: (docId) => void this.clickLink(docId),
      onOpenDoc: (docId) =>
        void this.guarded(`open:${docId}`, async () => {
          this.state = showDocument(this.state, await this.api.getDoc(docId));
        }),
      onOpenInNewWindow: (docId) => this.openWindow(`/doc/${docId}`),
      onAddFavorite: (docId) =>
        void this.guarded(`favorite:${docId}`, async () => {
          const favorites = await this.api.addFavorite(docId);
          this.state = applyFavorites(this.state, favorites.favorites);
          this.state = applySetView(this.state, await this.api.getSet());
        }),
      onRemoveFavorite: (docId) =>
        void this.guarded(`unfavorite:${docId}`, async () => {
          const favorites = await this.api.removeFavorite(docId);
          this.state = applyFavorites(this.state, favorites.favorites);
        }),
      onPauseToggle: () =>
        void this.guarded("pause", async () => {
          this.state = applySetView(this.state, await this.api.setPaused(!this.state.paused));
        }),
      onReset: () =>
        void this.guarded("reset", async () => {
          this.state = applySetView(this.state, await this.api.reset());
        }),
      onRefreshIntervalChange: (secs) =>
        void this.guarded("interval", async () => {
          this.state = applySetView(this.state, await this.api.setRefreshInterval(secs));
        }),
    };
  }

  async clickLink(docId: string): Promise<void> {
    await this.guarded(`click:${docId}`, async () => {
      // a click both rewards the link and opens it in the content area;
      // a NotInSet race (the link was replaced under us) still opens the
      // document, and the follow-up poll restores the true panel
      try {
        this.state = applySetView(this.state, await this.api.click(docId));
      } catch (error) {
        if (!String(error).includes("NotInSet")) {
          throw error;
        }
        this.state = applySetView(this.state, await this.api.getSet());
      }
      this.state = showDocument(this.state, await this.api.getDoc(docId));
    });
  }
}
