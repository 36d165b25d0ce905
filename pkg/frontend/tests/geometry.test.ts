import { describe, expect, it } from "vitest";
import {
  cameraWedge,
  projectOntoSegment,
  snapToMount,
  wedgeBisector,
  wrapDeg,
} from "../src/geometry.js";
import type { MountDoc } from "../src/types.js";

const MOUNTS: MountDoc[] = [
  { id: "north", start: { x: 0, y: 30 }, end: { x: 60, y: 30 } },
  { id: "west", start: { x: 0, y: 0 }, end: { x: 0, y: 30 } },
];

describe("wrapDeg", () => {
  it("wraps into [0, 360)", () => {
    expect(wrapDeg(0)).toBe(0);
    expect(wrapDeg(370)).toBe(10);
    expect(wrapDeg(-10)).toBe(350);
    expect(wrapDeg(720)).toBe(0);
  });
});

describe("projectOntoSegment", () => {
  it("projects inside the segment", () => {
    const q = projectOntoSegment({ x: 5, y: 3 }, { x: 0, y: 0 }, { x: 10, y: 0 });
    expect(q).toEqual({ x: 5, y: 0 });
  });

  it("clamps to endpoints", () => {
    const q = projectOntoSegment({ x: -4, y: 2 }, { x: 0, y: 0 }, { x: 10, y: 0 });
    expect(q).toEqual({ x: 0, y: 0 });
  });
});

describe("snapToMount", () => {
  it("picks the nearest mount within range", () => {
    const snap = snapToMount({ x: 20, y: 28.5 }, MOUNTS, 3);
    expect(snap?.mountId).toBe("north");
    expect(snap?.point).toEqual({ x: 20, y: 30 });
  });

  it("returns null when every mount is out of reach", () => {
    expect(snapToMount({ x: 30, y: 15 }, MOUNTS, 3)).toBeNull();
  });

  it("prefers the closer of two candidates", () => {
    const snap = snapToMount({ x: 1, y: 29 }, MOUNTS, 5);
    expect(snap?.mountId).toBe("north");
  });
});

describe("cameraWedge", () => {
  const cam = {
    x: 10, y: 20, pan_deg: 90, fov_deg: 50, min_range_m: 1, max_range_m: 19,
  };

  it("spans the field of view around the pan", () => {
    const w = cameraWedge(cam);
    expect(w.startDeg).toBe(65);
    expect(w.endDeg).toBe(115);
    expect(w.innerRadius).toBe(1);
    expect(w.outerRadius).toBe(19);
  });

  it("pan 90 gives a wedge bisected by the +y axis", () => {
    expect(wedgeBisector(cameraWedge(cam))).toBe(90);
  });

  it("bisector equals the pan for any angle", () => {
    for (const pan of [0, 45, 180, 300, 355]) {
      expect(wedgeBisector(cameraWedge({ ...cam, pan_deg: pan }))).toBeCloseTo(pan, 9);
    }
  });
});
