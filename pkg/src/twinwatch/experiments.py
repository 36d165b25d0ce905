"""Monte Carlo experiment harness over (preset, period, scenario) cells.

Each cell runs replicated simulations until enough suspect trajectories
accumulate, then reports the detection rate with a Wilson 95% interval.
Marginals pool detection counts, giving suspect-count-weighted means in
the same row/column arrangement as the reference accuracy table shipped
with the package.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import time as _time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.stats import binomtest

from .detection import DetectionThreshold, DetectionWeights, NormalizationBounds
from .errors import AxisMismatchError, ConfigError
from .simulation import (
    AgentKind,
    SimConfig,
    SimOutput,
    TimeOfDay,
    run_simulation,
)
from .station import CameraPreset, PRESET_LABELS, StationLayout, builtin_preset, layout_to_json

_SAFETY_REPLICATION_CAP = 100_000

OVERALL = "Overall"


@dataclass(frozen=True)
class ExperimentPlan:
    """Axes and stopping rule for one experiment run."""

    presets: tuple[str, ...] = ("Base",)
    periods: tuple[TimeOfDay, ...] = (TimeOfDay.MORNING, TimeOfDay.MIDDAY,
                                      TimeOfDay.AFTERNOON)
    scenarios: tuple[int, ...] = (1, 2, 3)
    target_suspects_per_cell: int = 1000
    mode: str = "stochastic"
    base_seed: int = 0
    weights: DetectionWeights = field(default_factory=DetectionWeights.equal)
    threshold: DetectionThreshold = field(default_factory=DetectionThreshold)
    bounds: NormalizationBounds = field(default_factory=NormalizationBounds)
    replication_minutes: float = 60.0
    max_replications: int | None = None
    sim_overrides: dict = field(default_factory=dict)
    custom_preset: CameraPreset | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.presets or not self.periods or not self.scenarios:
            raise ConfigError("experiment axes must be non-empty")
        if self.target_suspects_per_cell < 1:
            raise ConfigError("target suspect count must be at least 1")
        if any(s not in (1, 2, 3) for s in self.scenarios):
            raise ConfigError("scenarios must be drawn from {1, 2, 3}")
        if self.mode not in ("geometric", "stochastic"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.replication_minutes <= 0:
            raise ConfigError("replication duration must be positive")
        if self.max_replications is not None and self.max_replications < 1:
            raise ConfigError("max_replications must be at least 1")

    def to_dict(self) -> dict:
        return {
            "presets": list(self.presets),
            "periods": [p.label for p in self.periods],
            "scenarios": list(self.scenarios),
            "target_suspects_per_cell": self.target_suspects_per_cell,
            "mode": self.mode,
            "base_seed": self.base_seed,
            "weights": self.weights.to_dict(),
            "threshold": self.threshold.t,
            "bounds": self.bounds.to_dict(),
            "replication_minutes": self.replication_minutes,
            "max_replications": self.max_replications,
            "sim_overrides": {k: _override_repr(v)
                              for k, v in sorted(self.sim_overrides.items())},
        }


def _override_repr(v) -> object:
    return v.to_dict() if hasattr(v, "to_dict") else v


def wilson_halfwidth(detected: int, evaluated: int,
                     confidence: float = 0.95) -> float:
    """Half-width of the Wilson score interval for a binomial proportion."""
    if evaluated == 0:
        return 0.5
    ci = binomtest(detected, evaluated).proportion_ci(
        confidence_level=confidence, method="wilson")
    return (ci.high - ci.low) / 2.0


@dataclass(frozen=True)
class CellResult:
    preset: str
    period: str
    scenario: int
    evaluated: int
    detected: int
    accuracy: float
    ci_half_width: float
    replications: int

    def to_dict(self) -> dict:
        return {
            "preset": self.preset, "period": self.period,
            "scenario": self.scenario, "evaluated": self.evaluated,
            "detected": self.detected, "accuracy": self.accuracy,
            "ci_half_width": self.ci_half_width,
            "replications": self.replications,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CellResult":
        return cls(**d)


@dataclass(frozen=True)
class Marginal:
    evaluated: int
    detected: int
    accuracy: float
    ci_half_width: float


@dataclass(frozen=True)
class ExperimentReport:
    cells: tuple[CellResult, ...]
    plan: dict
    provenance: dict
    created_at: str

    # --- aggregation -----------------------------------------------------

    def _pool(self, rows: list[CellResult]) -> Marginal:
        ev = sum(r.evaluated for r in rows)
        de = sum(r.detected for r in rows)
        acc = de / ev if ev else 0.0
        return Marginal(ev, de, acc, wilson_halfwidth(de, ev))

    def presets(self) -> list[str]:
        out: list[str] = []
        for c in self.cells:
            if c.preset not in out:
                out.append(c.preset)
        return out

    def periods(self) -> list[str]:
        out: list[str] = []
        for c in self.cells:
            if c.period not in out:
                out.append(c.period)
        return out

    def scenarios(self) -> list[int]:
        return sorted({c.scenario for c in self.cells})

    def overall(self, preset: str) -> Marginal:
        return self._pool([c for c in self.cells if c.preset == preset])

    def by_period(self, preset: str, period: str) -> Marginal:
        return self._pool([c for c in self.cells
                           if c.preset == preset and c.period == period])

    def by_scenario(self, preset: str, scenario: int) -> Marginal:
        return self._pool([c for c in self.cells
                           if c.preset == preset and c.scenario == scenario])

    def row(self, preset: str) -> dict[str, float]:
        """One reference-table-shaped row: Overall, periods, scenarios."""
        out = {OVERALL: self.overall(preset).accuracy}
        for period in self.periods():
            out[period] = self.by_period(preset, period).accuracy
        for s in self.scenarios():
            out[f"Scenario {s}"] = self.by_scenario(preset, s).accuracy
        return out

    # --- serialization ---------------------------------------------------

    def to_dict(self, include_timestamp: bool = True) -> dict:
        d = {
            "plan": self.plan,
            "provenance": self.provenance,
            "cells": [c.to_dict() for c in self.cells],
        }
        if include_timestamp:
            d["created_at"] = self.created_at
        return d

    def canonical_json(self) -> str:
        """Stable byte form excluding the timestamp; used for hashing."""
        return json.dumps(self.to_dict(include_timestamp=False),
                          sort_keys=True, separators=(",", ":"))

    def report_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        return cls(
            cells=tuple(CellResult.from_dict(c) for c in d["cells"]),
            plan=d["plan"],
            provenance=d["provenance"],
            created_at=d.get("created_at", ""),
        )


def _cell_seed(base_seed: int, cell_index: int, rep: int) -> int:
    ss = np.random.SeedSequence(base_seed, spawn_key=(cell_index, rep))
    return int(ss.generate_state(1, np.uint64)[0])


def _count_cell(output: SimOutput, mode: str) -> tuple[int, int]:
    """(evaluated, detected) suspects for one replication.

    Geometric mode counts only suspects whose trajectory completed inside
    the replication window (a truncated walk would bias detection down);
    stochastic draws happen at spawn, so there every suspect counts.
    """
    evaluated = 0
    detected = 0
    for t in output.trajectories:
        if t.kind != AgentKind.SUSPECT:
            continue
        if mode == "geometric" and t.depart_time is None:
            continue
        evaluated += 1
        detected += int(t.detected)
    return evaluated, detected


def _resolve_preset(layout: StationLayout, plan: ExperimentPlan,
                    name: str) -> CameraPreset:
    if plan.custom_preset is not None and name == plan.custom_preset.name:
        return plan.custom_preset
    return builtin_preset(name, layout)


def _run_cell(layout: StationLayout, plan: ExperimentPlan,
              cell_index: int, preset_name: str, period: TimeOfDay,
              scenario: int) -> CellResult:
    preset = _resolve_preset(layout, plan, preset_name)
    duration = plan.replication_minutes * 60.0
    evaluated = 0
    detected = 0
    reps = 0
    while True:
        cfg = SimConfig(
            preset=preset, mode=plan.mode,
            seed=_cell_seed(plan.base_seed, cell_index, reps),
            period=period, weights=plan.weights, threshold=plan.threshold,
            bounds=plan.bounds, scenario=scenario, record_samples=False,
            **plan.sim_overrides)
        out = run_simulation(layout, cfg, duration)
        ev, de = _count_cell(out, plan.mode)
        evaluated += ev
        detected += de
        reps += 1
        if plan.max_replications is not None:
            if reps >= plan.max_replications:
                break
        elif evaluated >= plan.target_suspects_per_cell:
            break
        if reps >= _SAFETY_REPLICATION_CAP:
            raise ConfigError(
                f"cell {preset_name}/{period.label}/{scenario} failed to reach "
                f"{plan.target_suspects_per_cell} suspects in {reps} replications")
    return CellResult(
        preset=preset_name, period=period.label, scenario=scenario,
        evaluated=evaluated, detected=detected,
        accuracy=detected / evaluated if evaluated else 0.0,
        ci_half_width=wilson_halfwidth(detected, evaluated),
        replications=reps)


def run_experiment(layout: StationLayout, plan: ExperimentPlan) -> ExperimentReport:
    """Run every cell of the plan; deterministic given the base seed."""
    cells_spec = [(i, pr, pe, sc)
                  for i, (pr, pe, sc) in enumerate(
                      (pr, pe, sc)
                      for pr in plan.presets
                      for pe in plan.periods
                      for sc in plan.scenarios)]
    if plan.workers > 1:
        with ThreadPoolExecutor(max_workers=plan.workers) as pool:
            results = list(pool.map(
                lambda args: _run_cell(layout, plan, *args), cells_spec))
    else:
        results = [_run_cell(layout, plan, *args) for args in cells_spec]

    from . import __version__
    provenance = {
        "tool_version": __version__,
        "layout_name": layout.name,
        "layout_hash": hashlib.sha256(layout_to_json(layout).encode()).hexdigest(),
        "mode": plan.mode,
        "base_seed": plan.base_seed,
        "weights": plan.weights.to_dict(),
        "threshold": plan.threshold.t,
    }
    return ExperimentReport(
        cells=tuple(results),
        plan=plan.to_dict(),
        provenance=provenance,
        created_at=_time.strftime("%Y-%m-%dT%H:%M:%SZ", _time.gmtime()),
    )


# --- reference comparison ----------------------------------------------------


def load_reference_table() -> dict:
    """The shipped reference accuracy table (rows: presets; columns:
    Overall, the three periods, the three scenarios)."""
    path = resources.files("twinwatch").joinpath("data/reference_accuracy.json")
    return json.loads(path.read_text(encoding="utf-8"))


@dataclass(frozen=True)
class ComparisonRow:
    preset: str
    column: str
    ours: float
    reference: float
    delta: float
    flagged: bool

    def to_dict(self) -> dict:
        return {"preset": self.preset, "column": self.column, "ours": self.ours,
                "reference": self.reference, "delta": self.delta,
                "flagged": self.flagged}


def compare_to_reference(report: ExperimentReport, reference: dict | None = None,
                         tolerance: float = 0.03) -> list[ComparisonRow]:
    """Per-cell deltas between a report's marginals and the reference table.

    Raises AxisMismatchError unless the report covers every reference
    column (Overall plus each period and scenario present in the table)
    for every reference preset it is compared against.
    """
    if reference is None:
        reference = load_reference_table()
    ref_columns = reference["columns"]
    ref_rows = reference["rows"]
    report_presets = report.presets()
    missing_presets = [p for p in report_presets if p not in ref_rows]
    if missing_presets:
        raise AxisMismatchError(f"presets missing from reference: {missing_presets}")
    rows: list[ComparisonRow] = []
    for preset in report_presets:
        ours_row = report.row(preset)
        for col, ref_val in zip(ref_columns, ref_rows[preset]):
            if col not in ours_row:
                raise AxisMismatchError(
                    f"report lacks column {col!r} for preset {preset!r}")
            delta = ours_row[col] - ref_val
            rows.append(ComparisonRow(preset, col, ours_row[col], ref_val,
                                      delta, abs(delta) > tolerance))
    return rows


# --- export ------------------------------------------------------------------


def report_to_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["preset", "period", "scenario", "evaluated", "detected",
                     "accuracy", "ci_half_width", "replications"])
    for c in report.cells:
        writer.writerow([c.preset, c.period, c.scenario, c.evaluated,
                         c.detected, f"{c.accuracy:.6f}",
                         f"{c.ci_half_width:.6f}", c.replications])
    return buf.getvalue()


def report_to_markdown(report: ExperimentReport) -> str:
    """Reference-table-shaped markdown: preset rows, Overall plus per-period
    and per-scenario accuracy columns."""
    periods = report.periods()
    scenarios = report.scenarios()
    columns = [OVERALL] + periods + [f"Scenario {s}" for s in scenarios]
    lines = ["| Model | " + " | ".join(columns) + " |",
             "| --- |" + " --- |" * len(columns)]
    for preset in report.presets():
        row = report.row(preset)
        label = PRESET_LABELS.get(preset, preset)
        cells = " | ".join(f"{row[c]:.2f}" for c in columns)
        lines.append(f"| {label} | {cells} |")
    return "\n".join(lines) + "\n"


def export_report(report: ExperimentReport, fmt: str, path: str | Path) -> Path:
    """Write the report as csv, json, or markdown; returns the path."""
    path = Path(path)
    if fmt == "csv":
        path.write_text(report_to_csv(report), encoding="utf-8")
    elif fmt == "json":
        path.write_text(json.dumps(report.to_dict(), indent=2) + "\n",
                        encoding="utf-8")
    elif fmt == "markdown":
        path.write_text(report_to_markdown(report), encoding="utf-8")
    else:
        raise ConfigError(f"unknown export format {fmt!r}")
    return path


def load_report(path: str | Path) -> ExperimentReport:
    return ExperimentReport.from_dict(
        json.loads(Path(path).read_text(encoding="utf-8")))
