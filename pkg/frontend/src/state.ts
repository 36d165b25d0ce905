// Planner state and pure update functions. Everything here is plain data
// in, plain data out, so the editing rules are testable without a DOM.

import { snapToMount, wrapDeg } from "./geometry.js";
import type { CameraSpec, FieldError, HeatmapGrid, LayoutDoc, ReportDoc } from "./types.js";

export const SNAP_MAX_DISTANCE_M = 3.0;
export const CUSTOM_PRESET = "custom";

export interface EvalMeta {
  seed: number;
  mode: string;
}

export interface PlannerState {
  layout: LayoutDoc | null;
  cameras: CameraSpec[];
  presetName: string;
  selectedId: string | null;
  dirty: boolean;
  heatmap: HeatmapGrid | null;
  heatmapMeta: EvalMeta | null;
  report: ReportDoc | null;
  reportMeta: EvalMeta | null;
  pendingHeatmap: boolean;
  pendingEval: boolean;
  pendingOptimize: boolean;
  notice: string | null;
}

export function initialState(): PlannerState {
  return {
    layout: null,
    cameras: [],
    presetName: CUSTOM_PRESET,
    selectedId: null,
    dirty: false,
    heatmap: null,
    heatmapMeta: null,
    report: null,
    reportMeta: null,
    pendingHeatmap: false,
    pendingEval: false,
    pendingOptimize: false,
    notice: null,
  };
}

export function validateCamera(cam: CameraSpec): FieldError[] {
  const errors: FieldError[] = [];
  if (!Number.isFinite(cam.x) || !Number.isFinite(cam.y)) {
    errors.push({ field: "position", msg: "coordinates must be finite" });
  }
  if (!(cam.fov_deg > 0 && cam.fov_deg < 180)) {
    errors.push({ field: "fov_deg", msg: "field of view must be in (0, 180)" });
  }
  if (!(cam.min_range_m > 0 && cam.min_range_m < cam.max_range_m)) {
    errors.push({
      field: "min_range_m",
      msg: "min range must be positive and below max range",
    });
  }
  if (cam.pan_deg < 0 || cam.pan_deg >= 360) {
    errors.push({ field: "pan_deg", msg: "pan must lie in [0, 360)" });
  }
  return errors;
}

export function validateWeights(w: { w_a: number; w_d: number; w_n: number }): FieldError[] {
  const errors: FieldError[] = [];
  for (const [k, v] of Object.entries(w)) {
    if (v < 0 || v > 1) errors.push({ field: k, msg: "weight outside [0, 1]" });
  }
  if (Math.abs(w.w_a + w.w_d + w.w_n - 1) > 1e-9) {
    errors.push({ field: "weights", msg: "weights must sum to 1" });
  }
  return errors;
}

/** Errors that would be rejected server-side; requests are blocked while
 * any exist. */
export function cameraSetErrors(cameras: CameraSpec[]): FieldError[] {
  const errors = cameras.flatMap((c) =>
    validateCamera(c).map((e) => ({ ...e, field: `${c.id}.${e.field}` })),
  );
  const ids = new Set<string>();
  for (const c of cameras) {
    if (ids.has(c.id)) errors.push({ field: c.id, msg: "duplicate camera id" });
    ids.add(c.id);
  }
  return errors;
}

export function loadLayout(state: PlannerState, layout: LayoutDoc): PlannerState {
  const first = layout.presets[0];
  return {
    ...state,
    layout,
    cameras: first ? first.cameras.map((c) => ({ ...c })) : [],
    presetName: first ? first.name : CUSTOM_PRESET,
    selectedId: null,
    dirty: false,
    heatmap: null,
    notice: null,
  };
}

export function selectPreset(state: PlannerState, name: string): PlannerState {
  const preset = state.layout?.presets.find((p) => p.name === name);
  if (!preset) return { ...state, notice: `unknown preset ${name}` };
  return {
    ...state,
    cameras: preset.cameras.map((c) => ({ ...c })),
    presetName: preset.name,
    selectedId: null,
    dirty: true,
    notice: null,
  };
}

export function selectCamera(state: PlannerState, id: string | null): PlannerState {
  return { ...state, selectedId: id };
}

/**
 * Move a camera toward (x, y), snapping to the nearest mount segment.
 * A drop out of reach of every mount reverts the move and sets a notice.
 */
export function dragCamera(
  state: PlannerState,
  id: string,
  x: number,
  y: number,
): PlannerState {
  const mounts = state.layout?.camera_mounts ?? [];
  const snap = snapToMount({ x, y }, mounts, SNAP_MAX_DISTANCE_M);
  if (snap === null) {
    return { ...state, notice: "cameras must sit on a mount segment" };
  }
  return {
    ...state,
    cameras: state.cameras.map((c) =>
      c.id === id ? { ...c, x: snap.point.x, y: snap.point.y } : c,
    ),
    dirty: true,
    notice: null,
  };
}

export function rotateCamera(
  state: PlannerState,
  id: string,
  deltaDeg: number,
): PlannerState {
  return {
    ...state,
    cameras: state.cameras.map((c) =>
      c.id === id ? { ...c, pan_deg: wrapDeg(c.pan_deg + deltaDeg) } : c,
    ),
    dirty: true,
    notice: null,
  };
}

export function addCamera(state: PlannerState): PlannerState {
  const mounts = state.layout?.camera_mounts ?? [];
  if (mounts.length === 0) {
    return { ...state, notice: "layout has no camera mounts" };
  }
  const m = mounts[0];
  const mid = { x: (m.start.x + m.end.x) / 2, y: (m.start.y + m.end.y) / 2 };
  let n = state.cameras.length + 1;
  let id = `cam_custom_${n}`;
  const ids = new Set(state.cameras.map((c) => c.id));
  while (ids.has(id)) id = `cam_custom_${++n}`;
  const cam: CameraSpec = {
    id,
    x: mid.x,
    y: mid.y,
    pan_deg: 0,
    mount_height: 2.5,
    fov_deg: 50,
    min_range_m: 1,
    max_range_m: 19,
  };
  return {
    ...state,
    cameras: [...state.cameras, cam],
    presetName: CUSTOM_PRESET,
    selectedId: id,
    dirty: true,
    notice: null,
  };
}

export function deleteCamera(state: PlannerState, id: string): PlannerState {
  return {
    ...state,
    cameras: state.cameras.filter((c) => c.id !== id),
    presetName: CUSTOM_PRESET,
    selectedId: state.selectedId === id ? null : state.selectedId,
    dirty: true,
    notice: null,
  };
}

/** Best-so-far series for the optimize trace chart (monotone by construction). */
export function bestSoFar(objectives: number[]): number[] {
  const out: number[] = [];
  let best = -Infinity;
  for (const v of objectives) {
    best = Math.max(best, v);
    out.push(best);
  }
  return out;
}
