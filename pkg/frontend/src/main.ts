// Entry point: wires state, API, canvas, and controls together.

import { ApiError, PlannerApi } from "./api.js";
import { Debouncer, LatestOnly } from "./debounce.js";
import { distance } from "./geometry.js";
import { renderAccuracyPanel, renderErrorList } from "./panel.js";
import { buildScene } from "./scene.js";
import {
  drawScene,
  drawTrace,
  fitViewport,
  screenToWorld,
  worldToScreen,
  type Viewport,
} from "./render.js";
import {
  addCamera,
  bestSoFar,
  cameraSetErrors,
  CUSTOM_PRESET,
  deleteCamera,
  dragCamera,
  initialState,
  loadLayout,
  rotateCamera,
  selectCamera,
  selectPreset,
  type PlannerState,
} from "./state.js";

const HEATMAP_DEBOUNCE_MS = 300;
const HEATMAP_CELL_M = 1.0;
const QUICK_EVAL_REPLICATIONS = 2;
const QUICK_EVAL_MINUTES = 10;

const api = new PlannerApi("");
let state: PlannerState = initialState();
let viewport: Viewport | null = null;

const canvas = document.getElementById("floorplan") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const traceCanvas = document.getElementById("trace") as HTMLCanvasElement;
const traceCtx = traceCanvas.getContext("2d")!;

const el = {
  preset: document.getElementById("preset") as HTMLSelectElement,
  period: document.getElementById("period") as HTMLSelectElement,
  scenarios: document.getElementById("scenarios") as HTMLSelectElement,
  mode: document.getElementById("mode") as HTMLSelectElement,
  seed: document.getElementById("seed") as HTMLInputElement,
  addCamera: document.getElementById("add-camera") as HTMLButtonElement,
  deleteCamera: document.getElementById("delete-camera") as HTMLButtonElement,
  rotateLeft: document.getElementById("rotate-left") as HTMLButtonElement,
  rotateRight: document.getElementById("rotate-right") as HTMLButtonElement,
  quickEval: document.getElementById("quick-eval") as HTMLButtonElement,
  optimize: document.getElementById("optimize") as HTMLButtonElement,
  panel: document.getElementById("panel") as HTMLElement,
  status: document.getElementById("status") as HTMLElement,
  heatmapMeta: document.getElementById("heatmap-meta") as HTMLElement,
};

const evalMeta = () => ({
  seed: parseInt(el.seed.value || "0", 10),
  mode: el.mode.value,
});

function setState(next: PlannerState): void {
  state = next;
  redraw();
}

function redraw(): void {
  if (!state.layout) return;
  viewport = fitViewport(state.layout, canvas.width, canvas.height);
  const scene = buildScene(state.layout, state.cameras, state.heatmap,
    state.selectedId);
  drawScene(ctx, viewport, scene, canvas.width);
  el.status.textContent = state.notice
    ?? `${state.presetName} · ${state.cameras.length} cameras`
      + (state.pendingHeatmap ? " · heatmap…" : "")
      + (state.pendingEval ? " · evaluating…" : "")
      + (state.pendingOptimize ? " · optimizing…" : "");
  el.heatmapMeta.textContent = state.heatmapMeta
    ? `heatmap: seed ${state.heatmapMeta.seed} · ${state.heatmapMeta.mode} mode`
    : "";
  el.deleteCamera.disabled = state.selectedId === null;
  el.rotateLeft.disabled = state.selectedId === null;
  el.rotateRight.disabled = state.selectedId === null;
}

// --- heatmap: debounced on edit, latest request wins ------------------------

const heatmapGate = new LatestOnly();

async function refreshHeatmap(): Promise<void> {
  const errors = cameraSetErrors(state.cameras);
  if (errors.length > 0) {
    el.panel.innerHTML = renderErrorList(errors);
    return;
  }
  setState({ ...state, pendingHeatmap: true });
  try {
    const grid = await heatmapGate.run((signal) =>
      api.heatmap(state.cameras, HEATMAP_CELL_M, signal));
    if (grid !== null) {
      setState({
        ...state,
        heatmap: grid,
        heatmapMeta: evalMeta(),
        pendingHeatmap: false,
      });
    }
  } catch (err) {
    setState({ ...state, pendingHeatmap: false,
      notice: `heatmap failed: ${(err as Error).message}` });
  }
}

const heatmapDebounce = new Debouncer(HEATMAP_DEBOUNCE_MS, () => {
  void refreshHeatmap();
});

function edited(next: PlannerState): void {
  setState(next);
  if (next.dirty) heatmapDebounce.trigger();
}

// --- pointer interaction -----------------------------------------------------

let dragging: string | null = null;

function cameraAtScreenPoint(px: number, py: number): string | null {
  if (!viewport) return null;
  for (const cam of state.cameras) {
    const s = worldToScreen(viewport, { x: cam.x, y: cam.y });
    if (Math.hypot(s.x - px, s.y - py) <= 10) return cam.id;
  }
  return null;
}

canvas.addEventListener("pointerdown", (ev) => {
  const rect = canvas.getBoundingClientRect();
  const id = cameraAtScreenPoint(ev.clientX - rect.left, ev.clientY - rect.top);
  setState(selectCamera(state, id));
  if (id) {
    dragging = id;
    canvas.setPointerCapture(ev.pointerId);
  }
});

canvas.addEventListener("pointermove", (ev) => {
  if (!dragging || !viewport) return;
  const rect = canvas.getBoundingClientRect();
  const w = screenToWorld(viewport, {
    x: ev.clientX - rect.left,
    y: ev.clientY - rect.top,
  });
  edited(dragCamera(state, dragging, w.x, w.y));
});

canvas.addEventListener("pointerup", (ev) => {
  if (dragging) {
    dragging = null;
    canvas.releasePointerCapture(ev.pointerId);
  }
});

canvas.addEventListener("wheel", (ev) => {
  if (!state.selectedId) return;
  ev.preventDefault();
  edited(rotateCamera(state, state.selectedId, ev.deltaY > 0 ? -5 : 5));
});

// --- controls ----------------------------------------------------------------

el.preset.addEventListener("change", () => {
  edited(selectPreset(state, el.preset.value));
});
el.addCamera.addEventListener("click", () => {
  edited(addCamera(state));
  el.preset.value = CUSTOM_PRESET;
});
el.deleteCamera.addEventListener("click", () => {
  if (state.selectedId) {
    edited(deleteCamera(state, state.selectedId));
    el.preset.value = CUSTOM_PRESET;
  }
});
el.rotateLeft.addEventListener("click", () => {
  if (state.selectedId) edited(rotateCamera(state, state.selectedId, 10));
});
el.rotateRight.addEventListener("click", () => {
  if (state.selectedId) edited(rotateCamera(state, state.selectedId, -10));
});

function selectedScenarios(): number[] {
  const v = el.scenarios.value;
  return v === "all" ? [1, 2, 3] : [parseInt(v, 10)];
}

function selectedPeriods(): string[] {
  const v = el.period.value;
  return v === "all" ? ["Morning", "Midday", "Afternoon"] : [v];
}

el.quickEval.addEventListener("click", () => void runQuickEval());

async function runQuickEval(): Promise<void> {
  if (state.pendingEval) return;
  const errors = cameraSetErrors(state.cameras);
  if (errors.length > 0) {
    el.panel.innerHTML = renderErrorList(errors);
    return;
  }
  const meta = evalMeta();
  setState({ ...state, pendingEval: true, notice: null });
  try {
    // one request per period, sequentially: at most one in flight
    const reports = [];
    for (const period of selectedPeriods()) {
      reports.push(await api.simulate({
        cameras: state.cameras,
        period,
        scenarios: selectedScenarios(),
        mode: meta.mode,
        seed: meta.seed,
        replications: QUICK_EVAL_REPLICATIONS,
        replicationMinutes: QUICK_EVAL_MINUTES,
      }));
    }
    const merged = {
      ...reports[0],
      cells: reports.flatMap((r) => r.cells),
    };
    setState({ ...state, report: merged, reportMeta: meta, pendingEval: false });
    el.panel.innerHTML = renderAccuracyPanel(merged, meta);
  } catch (err) {
    setState({ ...state, pendingEval: false });
    el.panel.innerHTML = err instanceof ApiError && err.fields.length
      ? renderErrorList(err.fields)
      : renderErrorList([{ field: "request", msg: (err as Error).message }]);
  }
}

el.optimize.addEventListener("click", () => void runOptimize());

async function runOptimize(): Promise<void> {
  if (state.pendingOptimize) return;
  const errors = cameraSetErrors(state.cameras);
  if (errors.length > 0) {
    el.panel.innerHTML = renderErrorList(errors);
    return;
  }
  const meta = evalMeta();
  setState({ ...state, pendingOptimize: true, notice: null });
  const objectives: number[] = [];
  try {
    await api.optimizeStream({
      cameras: state.cameras,
      free: Object.fromEntries(state.cameras.map((c) => [c.id, { pan: [0, 360] }])),
      budget: 60,
      restarts: 1,
      objective: {
        mode: meta.mode,
        periods: selectedPeriods(),
        scenarios: selectedScenarios(),
        replications: 1,
        seed: meta.seed,
        duration_minutes: QUICK_EVAL_MINUTES,
      },
    }, (event) => {
      if (event.type === "progress") {
        objectives.push(event.objective);
        drawTrace(traceCtx, traceCanvas.width, traceCanvas.height,
          bestSoFar(objectives));
      } else if (event.type === "result") {
        setState({
          ...state,
          cameras: event.cameras,
          presetName: CUSTOM_PRESET,
          dirty: true,
          pendingOptimize: false,
          notice: `optimize: ${event.initial_objective.toFixed(3)} -> ` +
            `${event.final_objective.toFixed(3)}`,
        });
        el.preset.value = CUSTOM_PRESET;
        heatmapDebounce.trigger();
      } else {
        setState({ ...state, pendingOptimize: false,
          notice: `optimize failed: ${event.detail}` });
      }
    });
  } catch (err) {
    setState({ ...state, pendingOptimize: false,
      notice: `optimize failed: ${(err as Error).message}` });
  }
}

// --- boot ---------------------------------------------------------------------

async function boot(): Promise<void> {
  try {
    const layout = await api.getLayout();
    for (const p of layout.presets) {
      const opt = document.createElement("option");
      opt.value = p.name;
      opt.textContent = `${p.name} (${p.cameras.length})`;
      el.preset.appendChild(opt);
    }
    const custom = document.createElement("option");
    custom.value = CUSTOM_PRESET;
    custom.textContent = "custom";
    el.preset.appendChild(custom);
    setState(loadLayout(state, layout));
    heatmapDebounce.trigger();
  } catch (err) {
    el.status.textContent =
      `could not load the station layout: ${(err as Error).message}. ` +
      `Is the twinwatch service running?`;
  }
}

void boot();

export { cameraAtScreenPoint, distance };
