// DOM rendering: scene to SVG, detail panel, error toast.

import type { Scene } from "./scene.js";
import type { DocumentNode } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const EDGE_STROKE = "#b0bec5";
const TICK_FILL = "#607d8b";

function el<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  return node;
}

/** Replace the SVG contents with the scene: edges under circles, ticks on the left. */
export function drawScene(svg: SVGSVGElement, scene: Scene): void {
  svg.replaceChildren();

  for (const edge of scene.edges) {
    svg.append(
      el("line", {
        x1: String(edge.x1),
        y1: String(edge.y1),
        x2: String(edge.x2),
        y2: String(edge.y2),
        stroke: EDGE_STROKE,
        "stroke-width": "1",
        "stroke-opacity": edge.dimmed ? "0.2" : "0.8",
      }),
    );
  }

  for (const tick of scene.ticks) {
    const text = el("text", {
      x: "8",
      y: String(tick.y + 4),
      fill: TICK_FILL,
      "font-size": "12",
    });
    text.textContent = tick.label;
    svg.append(text);
  }

  for (const circle of scene.circles) {
    const node = el("circle", {
      cx: String(circle.x),
      cy: String(circle.y),
      r: String(circle.radius),
      fill: circle.fill,
      "data-id": circle.id,
    });
    (node.style as CSSStyleDeclaration).cursor = "pointer";
    svg.append(node);
  }
}

function metricsRows(node: DocumentNode): [string, string][] {
  if (!node.metrics) return [];
  const m = node.metrics;
  if (m.kind === "root") {
    return [
      ["cited", String(m.cited_count)],
      ["co-cited", String(m.cocited_count)],
      ["co-citing", String(m.cociting_count)],
      ["total rank", String(m.total_rank)],
    ];
  }
  return [
    ["citing", String(m.citing_count)],
    ["co-citing", String(m.cociting_count)],
    ["weighted co-cited", m.weighted_cocited.toFixed(3)],
    ["total rank", m.total_rank.toFixed(3)],
  ];
}

/** Fill the side panel for one node, or show the idle hint when none is selected. */
export function renderPanel(container: HTMLElement, node: DocumentNode | null): void {
  container.replaceChildren();
  if (!node) {
    const hint = document.createElement("p");
    hint.className = "hint";
    hint.textContent = "Click a node to inspect it.";
    container.append(hint);
    return;
  }

  const title = document.createElement("h2");
  title.textContent = node.title || node.id;
  container.append(title);

  const list = document.createElement("dl");
  const rows: [string, string][] = [
    ["id", node.id],
    ["authors", node.authors.join(", ") || "unknown"],
    ["year", node.year === null ? "unknown" : String(node.year)],
    ["global citations", String(node.citations)],
    ["role", node.role],
    ...metricsRows(node),
  ];
  for (const [label, value] of rows) {
    const dt = document.createElement("dt");
    dt.textContent = label;
    const dd = document.createElement("dd");
    dd.textContent = value;
    list.append(dt, dd);
  }
  container.append(list);

  const pivot = document.createElement("button");
  pivot.type = "button";
  pivot.dataset["action"] = "pivot";
  pivot.dataset["id"] = node.id;
  pivot.textContent = "Rebuild from here";
  container.append(pivot);
}

let toastTimer: ReturnType<typeof setTimeout> | undefined;

/** Show a transient, non-blocking error message. */
export function showToast(element: HTMLElement, message: string): void {
  element.textContent = message;
  element.classList.add("visible");
  if (toastTimer !== undefined) clearTimeout(toastTimer);
  toastTimer = setTimeout(() => element.classList.remove("visible"), 4000);
}
