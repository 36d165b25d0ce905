// Canvas execution of a scene display list plus the world/screen
// transform. Kept thin: layout of what to draw lives in scene.ts.

import type { Scene, Shape } from "./scene.js";
import type { LayoutDoc, Point } from "./types.js";

export interface Viewport {
  scale: number; // pixels per meter
  offsetX: number;
  offsetY: number;
  canvasHeight: number;
}

export function fitViewport(
  layout: LayoutDoc,
  canvasWidth: number,
  canvasHeight: number,
  margin = 20,
): Viewport {
  const w = layout.bounds.x_max - layout.bounds.x_min;
  const h = layout.bounds.y_max - layout.bounds.y_min;
  const scale = Math.min(
    (canvasWidth - 2 * margin) / w,
    (canvasHeight - 2 * margin) / h,
  );
  return {
    scale,
    offsetX: margin - layout.bounds.x_min * scale,
    offsetY: margin - layout.bounds.y_min * scale,
    canvasHeight,
  };
}

/** World meters (y up) to canvas pixels (y down). */
export function worldToScreen(v: Viewport, p: Point): Point {
  return {
    x: p.x * v.scale + v.offsetX,
    y: v.canvasHeight - (p.y * v.scale + v.offsetY),
  };
}

export function screenToWorld(v: Viewport, p: Point): Point {
  return {
    x: (p.x - v.offsetX) / v.scale,
    y: (v.canvasHeight - p.y - v.offsetY) / v.scale,
  };
}

function drawShape(ctx: CanvasRenderingContext2D, v: Viewport, s: Shape): void {
  if (s.kind === "rect") {
    const tl = worldToScreen(v, { x: s.x, y: s.y + s.h });
    const w = s.w * v.scale;
    const h = s.h * v.scale;
    if (s.fill) {
      ctx.fillStyle = s.fill;
      ctx.fillRect(tl.x, tl.y, w, h);
    }
    if (s.stroke) {
      ctx.strokeStyle = s.stroke;
      ctx.lineWidth = 1;
      ctx.strokeRect(tl.x, tl.y, w, h);
    }
  } else if (s.kind === "line") {
    const a = worldToScreen(v, { x: s.x1, y: s.y1 });
    const b = worldToScreen(v, { x: s.x2, y: s.y2 });
    ctx.strokeStyle = s.stroke;
    ctx.lineWidth = Math.max(1, s.width * v.scale);
    ctx.beginPath();
    ctx.moveTo(a.x, a.y);
    ctx.lineTo(b.x, b.y);
    ctx.stroke();
  } else if (s.kind === "dot") {
    const c = worldToScreen(v, { x: s.x, y: s.y });
    ctx.fillStyle = s.fill;
    ctx.beginPath();
    ctx.arc(c.x, c.y, Math.max(2, s.radius * v.scale), 0, 2 * Math.PI);
    ctx.fill();
  } else {
    const w = s.wedge;
    const c = worldToScreen(v, { x: w.cx, y: w.cy });
    const rOut = w.outerRadius * v.scale;
    const rIn = w.innerRadius * v.scale;
    // canvas y is flipped, so world CCW angles become clockwise negatives
    const a0 = (-w.startDeg * Math.PI) / 180;
    const a1 = (-w.endDeg * Math.PI) / 180;
    ctx.beginPath();
    ctx.arc(c.x, c.y, rOut, a0, a1, true);
    ctx.arc(c.x, c.y, rIn, a1, a0, false);
    ctx.closePath();
    ctx.fillStyle = s.selected ? "rgba(214, 39, 40, 0.30)" : "rgba(214, 39, 40, 0.15)";
    ctx.fill();
    ctx.strokeStyle = s.selected ? "#d62728" : "rgba(214, 39, 40, 0.6)";
    ctx.lineWidth = s.selected ? 2 : 1;
    ctx.stroke();
    ctx.fillStyle = "#d62728";
    ctx.beginPath();
    ctx.arc(c.x, c.y, s.selected ? 6 : 4, 0, 2 * Math.PI);
    ctx.fill();
  }
}

export function drawScene(
  ctx: CanvasRenderingContext2D,
  viewport: Viewport,
  scene: Scene,
  canvasWidth: number,
): void {
  ctx.clearRect(0, 0, canvasWidth, viewport.canvasHeight);
  for (const s of scene.shapes) drawShape(ctx, viewport, s);
  // color legend, bottom-left
  const x0 = 8;
  const y0 = viewport.canvasHeight - 18;
  scene.legend.forEach((entry, i) => {
    ctx.fillStyle = entry.color;
    ctx.fillRect(x0 + i * 34, y0, 14, 10);
    ctx.fillStyle = "#333";
    ctx.font = "10px sans-serif";
    ctx.fillText(entry.value.toFixed(2), x0 + i * 34 + 16, y0 + 9);
  });
}

export function drawTrace(
  ctx: CanvasRenderingContext2D,
  width: number,
  height: number,
  best: number[],
): void {
  ctx.clearRect(0, 0, width, height);
  if (best.length === 0) return;
  const lo = 0;
  const hi = Math.max(1e-9, Math.max(...best));
  const px = (i: number) => 10 + (i / Math.max(1, best.length - 1)) * (width - 20);
  const py = (v: number) => height - 12 - ((v - lo) / (hi - lo)) * (height - 24);
  ctx.strokeStyle = "#1f77b4";
  ctx.lineWidth = 2;
  ctx.beginPath();
  best.forEach((v, i) => {
    if (i === 0) ctx.moveTo(px(i), py(v));
    else {
      ctx.lineTo(px(i), py(best[i - 1]));
      ctx.lineTo(px(i), py(v));
    }
  });
  ctx.stroke();
  ctx.fillStyle = "#333";
  ctx.font = "10px sans-serif";
  ctx.fillText(`best ${best[best.length - 1].toFixed(3)}`, 12, 12);
}
