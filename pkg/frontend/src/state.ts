// Client view state: a mirror of the server's answers plus a smoothed
// countdown. Fitness values are never invented on the client; they always
// echo the last server payload.

import type {
  DocView,
  FavoriteEntry,
  SetEntry,
  SetView,
  Suggestion,
} from "./types.js";

export interface PanelState {
  entries: SetEntry[];
  iteration: number;
  secondsRemaining: number;
  paused: boolean;
  refreshInterval: number;
  favorites: FavoriteEntry[];
  suggestions: Suggestion[];
  contentDoc: DocView | null;
  error: string | null;
}

export function initialState(): PanelState {
  return {
    entries: [],
    iteration: 0,
    secondsRemaining: 0,
    paused: false,
    refreshInterval: 10,
    favorites: [],
    suggestions: [],
    contentDoc: null,
    error: null,
  };
}

export function applySetView(state: PanelState, view: SetView): PanelState {
  return {
    ...state,
    entries: view.set,
    iteration: view.iteration,
    secondsRemaining: view.seconds_to_next_refresh,
    paused: view.paused,
    refreshInterval: view.refresh_interval,
    error: null,
  };
}

export function applyFavorites(state: PanelState, favorites: FavoriteEntry[]): PanelState {
  return { ...state, favorites, error: null };
}

export function applySuggestions(state: PanelState, suggestions: Suggestion[]): PanelState {
  return { ...state, suggestions, error: null };
}

export function showDocument(state: PanelState, doc: DocView): PanelState {
  return { ...state, contentDoc: doc };
}

export function withError(state: PanelState, message: string): PanelState {
  return { ...state, error: message };
}

// Between polls the client counts the seconds down itself; a paused panel
// keeps its frozen value. The next server payload corrects any drift.
export function countdownTick(state: PanelState, seconds = 1): PanelState {
  if (state.paused) {
    return state;
  }
  return { ...state, secondsRemaining: Math.max(0, state.secondsRemaining - seconds) };
}
