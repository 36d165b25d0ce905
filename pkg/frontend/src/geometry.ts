// Ground-plane helpers. World coordinates are meters with y pointing
// north; azimuths are degrees counterclockwise from +x.

import type { MountDoc, Point } from "./types.js";

export function wrapDeg(a: number): number {
  return ((a % 360) + 360) % 360;
}

export function distance(a: Point, b: Point): number {
  return Math.hypot(a.x - b.x, a.y - b.y);
}

export interface SnapResult {
  mountId: string;
  point: Point;
  distance: number;
}

/** Project p onto the closed segment [a, b]; returns the closest point. */
export function projectOntoSegment(p: Point, a: Point, b: Point): Point {
  const abx = b.x - a.x;
  const aby = b.y - a.y;
  const len2 = abx * abx + aby * aby;
  if (len2 === 0) return { x: a.x, y: a.y };
  let t = ((p.x - a.x) * abx + (p.y - a.y) * aby) / len2;
  t = Math.max(0, Math.min(1, t));
  return { x: a.x + t * abx, y: a.y + t * aby };
}

/**
 * Nearest point on any mount segment within maxDistance meters, or null
 * when the drop point is too far from every mount.
 */
export function snapToMount(
  p: Point,
  mounts: MountDoc[],
  maxDistance: number,
): SnapResult | null {
  let best: SnapResult | null = null;
  for (const m of mounts) {
    const q = projectOntoSegment(p, m.start, m.end);
    const d = distance(p, q);
    if (d <= maxDistance && (best === null || d < best.distance)) {
      best = { mountId: m.id, point: q, distance: d };
    }
  }
  return best;
}

export interface Wedge {
  cx: number;
  cy: number;
  innerRadius: number;
  outerRadius: number;
  startDeg: number; // pan - fov/2
  endDeg: number; // pan + fov/2
}

export function cameraWedge(cam: {
  x: number;
  y: number;
  pan_deg: number;
  fov_deg: number;
  min_range_m: number;
  max_range_m: number;
}): Wedge {
  return {
    cx: cam.x,
    cy: cam.y,
    innerRadius: cam.min_range_m,
    outerRadius: cam.max_range_m,
    startDeg: cam.pan_deg - cam.fov_deg / 2,
    endDeg: cam.pan_deg + cam.fov_deg / 2,
  };
}

/** The azimuth that splits a wedge in half (the camera's optical axis). */
export function wedgeBisector(w: Wedge): number {
  return wrapDeg((w.startDeg + w.endDeg) / 2);
}
