/** Viewer state and its pure transitions; rendering is a function of this. */

import { CurveDocument } from "./types.js";

export interface Transform {
  x: number;
  y: number;
  k: number;
}

export interface ViewState {
  doc: CurveDocument;
  alpha: number;
  visible: ReadonlySet<string>;
  /** animation cursor: number of checkpoints drawn, in global time order */
  cursor: number;
  playing: boolean;
  speed: number; // checkpoints per second
  selected: number | null; // global checkpoint index
  transform: Transform;
  /** document checkpoint indices sorted by (timestamp, document order) */
  timeOrder: number[];
}

export const IDENTITY: Transform = { x: 0, y: 0, k: 1 };

export function createState(doc: CurveDocument): ViewState {
  const timeOrder = doc.checkpoints
    .map((cp, i) => i)
    .sort((a, b) => doc.checkpoints[a].timestamp - doc.checkpoints[b].timestamp || a - b);
  return {
    doc,
    alpha: doc.embeddings[0].alpha,
    visible: new Set(doc.series.map((s) => s.series_id)),
    cursor: doc.checkpoints.length, // full curve
    playing: false,
    speed: 8,
    selected: null,
    transform: IDENTITY,
    timeOrder,
  };
}

export function switchAlpha(state: ViewState, alpha: number): ViewState {
  if (!state.doc.embeddings.some((e) => e.alpha === alpha)) {
    return state;
  }
  return { ...state, alpha };
}

export function toggleSeries(state: ViewState, seriesId: string): ViewState {
  if (!state.doc.series.some((s) => s.series_id === seriesId)) {
    return state;
  }
  const visible = new Set(state.visible);
  if (visible.has(seriesId)) {
    visible.delete(seriesId);
  } else {
    visible.add(seriesId);
  }
  let selected = state.selected;
  if (selected !== null && !visible.has(state.doc.checkpoints[selected].series_id)) {
    selected = null; // selection must stay on a visible series
  }
  return { ...state, visible, selected };
}

export function setCursor(state: ViewState, cursor: number): ViewState {
  const n = state.doc.checkpoints.length;
  const clamped = Math.max(0, Math.min(n, Math.round(cursor)));
  return { ...state, cursor: clamped };
}

export function play(state: ViewState): ViewState {
  // restarting from the end replays from the beginning
  const cursor = state.cursor >= state.doc.checkpoints.length ? 0 : state.cursor;
  return { ...state, playing: true, cursor };
}

export function pause(state: ViewState): ViewState {
  return { ...state, playing: false };
}

export function setSpeed(state: ViewState, speed: number): ViewState {
  return { ...state, speed: Math.max(0.25, speed) };
}

/** Advance the animation by dt seconds; stops at the end of the curve. */
export function tick(state: ViewState, dtSeconds: number): ViewState {
  if (!state.playing) {
    return state;
  }
  const n = state.doc.checkpoints.length;
  const cursor = Math.min(n, state.cursor + state.speed * dtSeconds);
  return { ...state, cursor, playing: cursor < n };
}

export function selectCheckpoint(state: ViewState, index: number | null): ViewState {
  if (index === null || index === state.selected) {
    return { ...state, selected: null }; // clicking again closes
  }
  const cp = state.doc.checkpoints[index];
  if (!cp || !state.visible.has(cp.series_id)) {
    return state;
  }
  return { ...state, selected: index };
}

export function setTransform(state: ViewState, transform: Transform): ViewState {
  return { ...state, transform };
}

/**
 * Checkpoints drawn per series at the current cursor: the cursor walks all
 * checkpoints in global timestamp order, each series reveals only its own.
 */
export function visibleCounts(state: ViewState): Map<string, number> {
  const counts = new Map<string, number>();
  for (const s of state.doc.series) {
    counts.set(s.series_id, 0);
  }
  const limit = Math.floor(state.cursor);
  for (let k = 0; k < limit && k < state.timeOrder.length; k++) {
    const cp = state.doc.checkpoints[state.timeOrder[k]];
    counts.set(cp.series_id, (counts.get(cp.series_id) ?? 0) + 1);
  }
  return counts;
}

export function activeEmbedding(state: ViewState) {
  const emb = state.doc.embeddings.find((e) => e.alpha === state.alpha);
  if (!emb) {
    throw new Error(`no embedding for alpha=${state.alpha}`);
  }
  return emb;
}
