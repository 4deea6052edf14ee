/** UI state shared by the six views.
 *
 * Selections reference server objects (pattern chars, AOI node ids), so a
 * revision change invalidates them: derived data must be refetched exactly
 * once and stale selections cleared before anything re-renders.
 */

export interface UiState {
  sessionId: string | null;
  revision: number;
  k: number | null; // null = finest level
  n: number;
  tau: number;
  mode: "total" | "diff";
  p: string | null;
  q: string | null;
  sortParticipant: string | null;
  selectedAois: number[]; // pink highlight set (sibling node ids)
  selectedPatterns: string[];
  hoverPattern: string | null;
  seed: number;
}

export const initialState: UiState = {
  sessionId: null,
  revision: -1,
  k: null,
  n: 2,
  tau: 6,
  mode: "total",
  p: null,
  q: null,
  sortParticipant: null,
  selectedAois: [],
  selectedPatterns: [],
  hoverPattern: null,
  seed: 0,
};

export type Listener = (state: UiState, changed: (keyof UiState)[]) => void;

export class Store {
  state: UiState = { ...initialState };
  private listeners: Listener[] = [];

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  set(partial: Partial<UiState>): void {
    const changed = (Object.keys(partial) as (keyof UiState)[]).filter(
      (key) => this.state[key] !== partial[key],
    );
    if (changed.length === 0) return;
    this.state = { ...this.state, ...partial };
    for (const listener of [...this.listeners]) listener(this.state, changed);
  }

  /** Adopt a server revision; clears stale selections when it moved. */
  applyRevision(revision: number): boolean {
    if (revision === this.state.revision) return false;
    this.set({
      revision,
      selectedAois: [],
      selectedPatterns: [],
      hoverPattern: null,
    });
    return true;
  }
}
