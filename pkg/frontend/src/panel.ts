// Accuracy panel: renders an experiment report as an HTML table in the
// reference arrangement (one row per camera set; Overall, then period
// columns, then scenario columns), with the seed and mode that produced
// it, so any screenshot is reproducible.

import type { EvalMeta } from "./state.js";
import type { ReportCell, ReportDoc } from "./types.js";

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function pool(cells: ReportCell[]): { accuracy: number; evaluated: number } {
  const ev = cells.reduce((s, c) => s + c.evaluated, 0);
  const de = cells.reduce((s, c) => s + c.detected, 0);
  return { accuracy: ev ? de / ev : 0, evaluated: ev };
}

export interface AccuracyTable {
  rowLabel: string;
  columns: string[];
  values: number[];
  evaluated: number;
}

export function accuracyTable(report: ReportDoc): AccuracyTable {
  const cells = report.cells;
  const periods: string[] = [];
  for (const c of cells) if (!periods.includes(c.period)) periods.push(c.period);
  const scenarios = [...new Set(cells.map((c) => c.scenario))].sort();

  const columns = ["Overall", ...periods, ...scenarios.map((s) => `Scenario ${s}`)];
  const values = [
    pool(cells).accuracy,
    ...periods.map((p) => pool(cells.filter((c) => c.period === p)).accuracy),
    ...scenarios.map((s) => pool(cells.filter((c) => c.scenario === s)).accuracy),
  ];
  return {
    rowLabel: cells[0]?.preset ?? "custom",
    columns,
    values,
    evaluated: pool(cells).evaluated,
  };
}

export function renderAccuracyPanel(report: ReportDoc, meta: EvalMeta): string {
  const table = accuracyTable(report);
  const header = table.columns.map((c) => `<th>${esc(c)}</th>`).join("");
  const cells = table.values.map((v) => `<td>${v.toFixed(2)}</td>`).join("");
  return [
    `<table class="accuracy">`,
    `<thead><tr><th>Cameras</th>${header}</tr></thead>`,
    `<tbody><tr><td>${esc(table.rowLabel)}</td>${cells}</tr></tbody>`,
    `</table>`,
    `<p class="meta">seed ${meta.seed} &middot; ${esc(meta.mode)} mode &middot; ` +
      `${table.evaluated} suspect trajectories</p>`,
  ].join("\n");
}

export function renderErrorList(errors: { field: string; msg: string }[]): string {
  const items = errors
    .map((e) => `<li><code>${esc(e.field)}</code>: ${esc(e.msg)}</li>`)
    .join("");
  return `<ul class="errors">${items}</ul>`;
}
