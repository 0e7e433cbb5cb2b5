// Payload shapes of the JSON endpoints (the only backend surface used).

export interface SetEntry {
  doc_id: string;
  title: string;
  fitness: number;
}

export interface SetView {
  set: SetEntry[];
  iteration: number;
  seconds_to_next_refresh: number;
  paused: boolean;
  refresh_interval: number;
}

export interface FavoriteEntry {
  doc_id: string;
  title: string;
  time_alive: number;
}

export interface FavoritesView {
  favorites: FavoriteEntry[];
}

export interface Suggestion {
  doc_id: string;
  title: string;
  loi: number;
  contributing_users: number;
}

export interface SuggestionsView {
  suggestions: Suggestion[];
}

export interface DocView {
  doc_id: string;
  title: string;
  body: string;
  uri: string;
}

export interface ApiError {
  error: string;
  detail?: string;
}
