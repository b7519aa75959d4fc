// Pure projection from view state to drawable primitives.

import { FILL_COLORS, type FillToken } from "./colors.js";
import type { GraphDocument, WorkId } from "./types.js";
import type { ViewState } from "./state.js";

export interface SceneCircle {
  id: WorkId;
  x: number;
  y: number;
  radius: number;
  token: FillToken;
  fill: string;
}

export interface SceneEdge {
  from: WorkId;
  to: WorkId;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  dimmed: boolean;
}

export interface SceneTick {
  label: string;
  y: number;
}

export interface Scene {
  circles: SceneCircle[];
  edges: SceneEdge[];
  ticks: SceneTick[];
}

/**
 * Fill token per node, recomputed from the document's edge list with the
 * same precedence the server uses: selection beats the source colour,
 * which beats the neighbourhood green, which beats the default. No
 * network involved; the document already carries everything needed.
 */
export function styleTokens(
  document: GraphDocument,
  selected: WorkId | null,
): Map<WorkId, FillToken> {
  const related = new Set<WorkId>();
  if (selected !== null) {
    for (const edge of document.edges) {
      if (edge.from === selected) related.add(edge.to);
      else if (edge.to === selected) related.add(edge.from);
    }
  }
  const tokens = new Map<WorkId, FillToken>();
  for (const node of document.nodes) {
    if (node.id === selected) tokens.set(node.id, "selected-yellow");
    else if (node.role === "Source") tokens.set(node.id, "source-grey");
    else if (related.has(node.id)) tokens.set(node.id, "related-green");
    else tokens.set(node.id, "default");
  }
  return tokens;
}

/**
 * Project the document through the viewport. Output order follows the
 * document (nodes, edges, ticks are already deterministically sorted),
 * so rendering the same state twice yields identical scenes.
 */
export function render(state: ViewState): Scene {
  const { document, selected, viewport } = state;
  const sx = (x: number) => x * viewport.zoom + viewport.panX;
  const sy = (y: number) => y * viewport.zoom + viewport.panY;

  const tokens = styleTokens(document, selected);
  const positions = new Map<WorkId, { x: number; y: number }>();

  const circles: SceneCircle[] = document.nodes.map((node) => {
    const x = sx(node.x);
    const y = sy(node.y);
    positions.set(node.id, { x, y });
    const token = tokens.get(node.id) ?? "default";
    return {
      id: node.id,
      x,
      y,
      radius: node.radius * viewport.zoom,
      token,
      fill: FILL_COLORS[token],
    };
  });

  const edges: SceneEdge[] = [];
  for (const edge of document.edges) {
    const a = positions.get(edge.from);
    const b = positions.get(edge.to);
    if (!a || !b) continue;
    const incident = edge.from === selected || edge.to === selected;
    edges.push({
      from: edge.from,
      to: edge.to,
      x1: a.x,
      y1: a.y,
      x2: b.x,
      y2: b.y,
      dimmed: selected !== null && !incident,
    });
  }

  const ticks: SceneTick[] = document.year_ticks.map((tick) => ({
    label: tick.year === null ? "?" : String(tick.year),
    y: sy(tick.y),
  }));

  return { circles, edges, ticks };
}
