// Builds a plain display list from planner state. The canvas layer just
// executes these shapes, so everything about what gets drawn is testable
// as data.

import { cameraWedge, type Wedge } from "./geometry.js";
import { ZONE_FILLS, scoreColor } from "./colors.js";
import type { CameraSpec, HeatmapGrid, LayoutDoc } from "./types.js";

export interface RectShape {
  kind: "rect";
  x: number;
  y: number;
  w: number;
  h: number;
  fill: string | null;
  stroke: string | null;
  label?: string;
}

export interface LineShape {
  kind: "line";
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  stroke: string;
  width: number;
}

export interface DotShape {
  kind: "dot";
  x: number;
  y: number;
  radius: number;
  fill: string;
}

export interface WedgeShape {
  kind: "wedge";
  wedge: Wedge;
  cameraId: string;
  selected: boolean;
}

export type Shape = RectShape | LineShape | DotShape | WedgeShape;

export interface Scene {
  shapes: Shape[];
  legend: { value: number; color: string }[];
}

export function buildScene(
  layout: LayoutDoc,
  cameras: CameraSpec[],
  heatmap: HeatmapGrid | null,
  selectedId: string | null,
): Scene {
  const shapes: Shape[] = [];

  for (const z of layout.zones) {
    shapes.push({
      kind: "rect",
      x: z.rect.x_min,
      y: z.rect.y_min,
      w: z.rect.x_max - z.rect.x_min,
      h: z.rect.y_max - z.rect.y_min,
      fill: ZONE_FILLS[z.kind] ?? null,
      stroke: "#999",
      label: z.id,
    });
  }

  // heatmap cells sit above zones, below the graph and cameras; an
  // absent grid simply adds nothing
  if (heatmap) {
    for (let row = 0; row < heatmap.height; row++) {
      for (let col = 0; col < heatmap.width; col++) {
        const v = heatmap.values[row * heatmap.width + col];
        if (v <= 0) continue;
        shapes.push({
          kind: "rect",
          x: heatmap.origin.x + col * heatmap.cell_size,
          y: heatmap.origin.y + row * heatmap.cell_size,
          w: heatmap.cell_size,
          h: heatmap.cell_size,
          fill: scoreColor(v),
          stroke: null,
        });
      }
    }
  }

  const nodeById = new Map(layout.nav_nodes.map((n) => [n.id, n]));
  for (const e of layout.nav_edges) {
    const a = nodeById.get(e.a);
    const b = nodeById.get(e.b);
    if (!a || !b) continue;
    shapes.push({
      kind: "line", x1: a.x, y1: a.y, x2: b.x, y2: b.y,
      stroke: "#bbb", width: 0.08,
    });
  }
  for (const n of layout.nav_nodes) {
    shapes.push({ kind: "dot", x: n.x, y: n.y, radius: 0.25, fill: "#666" });
  }

  for (const m of layout.camera_mounts) {
    shapes.push({
      kind: "line", x1: m.start.x, y1: m.start.y, x2: m.end.x, y2: m.end.y,
      stroke: "#444", width: 0.18,
    });
  }

  for (const cam of cameras) {
    shapes.push({
      kind: "wedge",
      wedge: cameraWedge(cam),
      cameraId: cam.id,
      selected: cam.id === selectedId,
    });
  }

  const legend = [0, 0.25, 0.5, 0.75, 1].map((v) => ({
    value: v,
    color: scoreColor(v, 1),
  }));
  return { shapes, legend };
}

export function wedgeShapes(scene: Scene): WedgeShape[] {
  return scene.shapes.filter((s): s is WedgeShape => s.kind === "wedge");
}

export function heatmapCellCount(scene: Scene): number {
  return scene.shapes.filter((s) => s.kind === "rect" && s.stroke === null).length;
}
