// Color scale for detection scores in [0, 1]: dark blue through green to
// yellow, matching the matplotlib viridis ramp closely enough for parity
// between the web overlay and the CLI figures.

const STOPS: [number, [number, number, number]][] = [
  [0.0, [68, 1, 84]],
  [0.25, [59, 82, 139]],
  [0.5, [33, 145, 140]],
  [0.75, [94, 201, 98]],
  [1.0, [253, 231, 37]],
];

export function scoreColor(value: number, alpha = 0.75): string {
  const v = Math.max(0, Math.min(1, value));
  for (let i = 1; i < STOPS.length; i++) {
    const [v1, c1] = STOPS[i - 1];
    const [v2, c2] = STOPS[i];
    if (v <= v2) {
      const t = v2 === v1 ? 0 : (v - v1) / (v2 - v1);
      const r = Math.round(c1[0] + t * (c2[0] - c1[0]));
      const g = Math.round(c1[1] + t * (c2[1] - c1[1]));
      const b = Math.round(c1[2] + t * (c2[2] - c1[2]));
      return `rgba(${r}, ${g}, ${b}, ${alpha})`;
    }
  }
  return `rgba(253, 231, 37, ${alpha})`;
}

export const ZONE_FILLS: Record<string, string> = {
  entrance: "rgba(127, 201, 127, 0.25)",
  exit: "rgba(253, 192, 134, 0.25)",
  concourse: "rgba(160, 160, 160, 0.10)",
  gate_line: "rgba(190, 174, 212, 0.30)",
  ticket_machine: "rgba(255, 255, 153, 0.35)",
  platform: "rgba(128, 177, 211, 0.30)",
};
