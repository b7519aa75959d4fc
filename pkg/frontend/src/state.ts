// View state and the pure transitions the UI applies to it.

import type { GraphDocument, WorkId } from "./types.js";

export const ZOOM_MIN = 0.1;
export const ZOOM_MAX = 10;

export interface Viewport {
  panX: number;
  panY: number;
  zoom: number;
}

export interface ViewState {
  document: GraphDocument;
  selected: WorkId | null;
  hover: WorkId | null;
  viewport: Viewport;
}

export function createState(document: GraphDocument): ViewState {
  return {
    document,
    selected: null,
    hover: null,
    viewport: { panX: 0, panY: 0, zoom: 1 },
  };
}

function hasNode(document: GraphDocument, id: WorkId): boolean {
  return document.nodes.some((n) => n.id === id);
}

/**
 * Toggle the selection. Reselecting the current node clears it; a node
 * not present in the document leaves the state untouched.
 */
export function select(state: ViewState, node: WorkId): ViewState {
  if (!hasNode(state.document, node)) {
    console.warn(`select ignored: ${node} is not in the document`);
    return state;
  }
  const selected = state.selected === node ? null : node;
  return { ...state, selected };
}

export function setHover(state: ViewState, node: WorkId | null): ViewState {
  const hover = node !== null && hasNode(state.document, node) ? node : null;
  return { ...state, hover };
}

export function pan(state: ViewState, dx: number, dy: number): ViewState {
  const { panX, panY, zoom } = state.viewport;
  return { ...state, viewport: { panX: panX + dx, panY: panY + dy, zoom } };
}

function clampZoom(zoom: number): number {
  return Math.min(ZOOM_MAX, Math.max(ZOOM_MIN, zoom));
}

export function zoomTo(state: ViewState, zoom: number): ViewState {
  return {
    ...state,
    viewport: { ...state.viewport, zoom: clampZoom(zoom) },
  };
}

/**
 * Scale the zoom by a factor while keeping the screen point (cx, cy)
 * over the same document coordinate.
 */
export function zoomBy(
  state: ViewState,
  factor: number,
  cx = 0,
  cy = 0,
): ViewState {
  const { panX, panY, zoom } = state.viewport;
  const next = clampZoom(zoom * factor);
  const ratio = next / zoom;
  return {
    ...state,
    viewport: {
      panX: cx - (cx - panX) * ratio,
      panY: cy - (cy - panY) * ratio,
      zoom: next,
    },
  };
}

/**
 * Swap in a freshly built document. Selection and hover are cleared
 * because their ids may not exist any more; the viewport is kept.
 */
export function applyDocument(
  state: ViewState,
  document: GraphDocument,
): ViewState {
  return { ...state, document, selected: null, hover: null };
}
