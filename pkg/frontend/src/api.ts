// Thin JSON client. fetch is injected so tests can stub the transport;
// cookies carry the session, so every call uses credentials: "include".

import type { DocView, FavoritesView, SetView, SuggestionsView } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, credentials: "include" };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const payload = await response.json();
    if (!response.ok) {
      const message = payload && payload.error ? payload.error : `HTTP ${response.status}`;
      throw new Error(message);
    }
    return payload as T;
  }

  getSet(): Promise<SetView> {
    return this.request("GET", "/set");
  }

  click(docId: string): Promise<SetView> {
    return this.request("POST", "/click", { doc_id: docId });
  }

  addFavorite(docId: string): Promise<FavoritesView> {
    return this.request("POST", "/favorite", { doc_id: docId });
  }

  removeFavorite(docId: string): Promise<FavoritesView> {
    return this.request("DELETE", `/favorite/${docId}`);
  }

  getFavorites(): Promise<FavoritesView> {
    return this.request("GET", "/favorites");
  }

  getSuggestions(): Promise<SuggestionsView> {
    return this.request("GET", "/suggestions");
  }

  reset(): Promise<SetView> {
    return this.request("POST", "/reset");
  }

  setPaused(paused: boolean): Promise<SetView> {
    return this.request("POST", "/pause", { paused });
  }

  setRefreshInterval(secs: number): Promise<SetView> {
    return this.request("POST", "/refresh_interval", { secs });
  }

  getDoc(docId: string): Promise<DocView> {
    return this.request("GET", `/doc/${docId}`);
  }
}
