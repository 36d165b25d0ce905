// Wire types mirroring the twinwatch HTTP API payloads.

export interface Point {
  x: number;
  y: number;
}

export interface CameraSpec {
  id: string;
  x: number;
  y: number;
  pan_deg: number;
  mount_height: number;
  fov_deg: number;
  min_range_m: number;
  max_range_m: number;
}

export interface ZoneDoc {
  id: string;
  kind: string;
  rect: { x_min: number; y_min: number; x_max: number; y_max: number };
  nodes: string[];
}

export interface MountDoc {
  id: string;
  start: Point;
  end: Point;
}

export interface LayoutDoc {
  format_version: number;
  name: string;
  bounds: { x_min: number; y_min: number; x_max: number; y_max: number };
  zones: ZoneDoc[];
  nav_nodes: { id: string; x: number; y: number }[];
  nav_edges: { a: string; b: string; length: number }[];
  camera_mounts: MountDoc[];
  presets: { name: string; cameras: CameraSpec[] }[];
}

export interface HeatmapGrid {
  origin: Point;
  cell_size: number;
  width: number;
  height: number;
  values: number[];
}

export interface ReportCell {
  preset: string;
  period: string;
  scenario: number;
  evaluated: number;
  detected: number;
  accuracy: number;
  ci_half_width: number;
  replications: number;
}

export interface ReportDoc {
  plan: { mode: string; base_seed: number; [k: string]: unknown };
  provenance: Record<string, unknown>;
  cells: ReportCell[];
  created_at?: string;
}

export interface OptimizeProgressEvent {
  type: "progress";
  iteration: number;
  objective: number;
  best: number;
}

export interface OptimizeResultEvent {
  type: "result";
  cameras: CameraSpec[];
  initial_objective: number;
  final_objective: number;
  converged: boolean;
  evaluations: number;
}

export interface OptimizeErrorEvent {
  type: "error";
  detail: string;
}

export type OptimizeEvent =
  | OptimizeProgressEvent
  | OptimizeResultEvent
  | OptimizeErrorEvent;

export interface FieldError {
  field: string;
  msg: string;
}
