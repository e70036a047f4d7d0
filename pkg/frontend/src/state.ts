/**
 * Single source of truth for viewer interactions.
 *
 * At most one selection source is active at a time: hovering a mark and
 * clicking an entity both resolve to the same (fact, row) shape, and setting
 * either replaces whatever was active before. All mutations go through the
 * store so the DOM layer only ever reacts to state changes.
 */

import type { Artifact } from "./schema.js";

export interface MarkRef {
  fact: number;
  row: number;
}

export type Selection =
  | { source: "none" }
  | { source: "mark"; fact: number; row: number }
  | { source: "entity"; fact: number; row: number };

export type Listener = (state: ViewerState) => void;

export interface ViewerState {
  artifact: Artifact | null;
  selection: Selection;
}

export class ViewerStore {
  private state: ViewerState = { artifact: null, selection: { source: "none" } };
  private listeners: Listener[] = [];

  getState(): ViewerState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private set(next: ViewerState): void {
    this.state = next;
    for (const listener of this.listeners) listener(next);
  }

  setArtifact(artifact: Artifact | null): void {
    this.set({ artifact, selection: { source: "none" } });
  }

  hoverMark(fact: number, row: number): void {
    this.set({ ...this.state, selection: { source: "mark", fact, row } });
  }

  unhoverMark(): void {
    if (this.state.selection.source === "mark") {
      this.set({ ...this.state, selection: { source: "none" } });
    }
  }

  selectEntity(fact: number, row: number): void {
    this.set({ ...this.state, selection: { source: "entity", fact, row } });
  }

  clearSelection(): void {
    this.set({ ...this.state, selection: { source: "none" } });
  }

  /** The (fact, row) the current selection resolves to, if any. */
  resolved(): MarkRef | null {
    const sel = this.state.selection;
    return sel.source === "none" ? null : { fact: sel.fact, row: sel.row };
  }
}
