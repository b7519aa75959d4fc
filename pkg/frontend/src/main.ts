// Wires the pure state and scene modules to the page.

import { ApiError, PivotController, fetchGraph, fetchWork } from "./api.js";
import { drawScene, renderPanel, showToast } from "./dom.js";
import { render } from "./scene.js";
import {
  applyDocument,
  createState,
  pan,
  select,
  zoomBy,
  type ViewState,
} from "./state.js";

const BASE = "";

async function boot(): Promise<void> {
  const svg = document.querySelector<SVGSVGElement>("#graph");
  const panel = document.querySelector<HTMLElement>("#panel");
  const toast = document.querySelector<HTMLElement>("#toast");
  if (!svg || !panel || !toast) throw new Error("viewer markup is incomplete");

  let state: ViewState = createState(await fetchGraph(BASE));
  const pivots = new PivotController();

  const redraw = () => drawScene(svg, render(state));

  async function showSelection(): Promise<void> {
    if (state.selected === null) {
      renderPanel(panel!, null);
      return;
    }
    try {
      renderPanel(panel!, await fetchWork(BASE, state.selected));
    } catch (err) {
      showToast(toast!, err instanceof Error ? err.message : String(err));
    }
  }

  svg.addEventListener("click", (event) => {
    const id = (event.target as SVGElement).dataset?.["id"];
    if (!id) return;
    state = select(state, id);
    redraw();
    void showSelection();
  });

  panel.addEventListener("click", (event) => {
    const button = (event.target as HTMLElement).closest<HTMLButtonElement>(
      'button[data-action="pivot"]',
    );
    const id = button?.dataset["id"];
    if (!id) return;
    void (async () => {
      try {
        const document = await pivots.pivot(BASE, id);
        if (document === null) return; // superseded by a newer pivot
        state = applyDocument(state, document);
        redraw();
        renderPanel(panel!, null);
      } catch (err) {
        const message =
          err instanceof ApiError ? `rebuild failed: ${err.message}` : String(err);
        showToast(toast!, message);
      }
    })();
  });

  svg.addEventListener("wheel", (event) => {
    event.preventDefault();
    const factor = event.deltaY < 0 ? 1.1 : 1 / 1.1;
    state = zoomBy(state, factor, event.offsetX, event.offsetY);
    redraw();
  });

  let dragging: { x: number; y: number } | null = null;
  svg.addEventListener("pointerdown", (event) => {
    dragging = { x: event.clientX, y: event.clientY };
    svg.setPointerCapture(event.pointerId);
  });
  svg.addEventListener("pointermove", (event) => {
    if (!dragging) return;
    state = pan(state, event.clientX - dragging.x, event.clientY - dragging.y);
    dragging = { x: event.clientX, y: event.clientY };
    redraw();
  });
  svg.addEventListener("pointerup", () => {
    dragging = null;
  });

  renderPanel(panel, null);
  redraw();
}

boot().catch((err) => {
  console.error("viewer failed to start", err);
});
