"""Matplotlib figure rendering for reports and coverage heatmaps.

All entry points write PNG files next to the delimited exports; the Agg
backend is forced so rendering works headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Rectangle, Wedge

from .experiments import ComparisonRow, ExperimentReport, OVERALL
from .heatmap import HeatmapGrid
from .station import Camera, PRESET_LABELS, StationLayout

ZONE_COLORS = {
    "entrance": "#7fc97f",
    "exit": "#fdc086",
    "concourse": "#f0f0f0",
    "gate_line": "#beaed4",
    "ticket_machine": "#ffff99",
    "platform": "#80b1d3",
}


def save_heatmap_figure(grid: HeatmapGrid, path: str | Path,
                        layout: StationLayout | None = None,
                        cameras: list[Camera] | tuple[Camera, ...] = ()) -> Path:
    """Render the coverage grid with zone outlines and camera view wedges."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(10, 5.5))
    extent = (grid.origin.x, grid.origin.x + grid.width * grid.cell_size,
              grid.origin.y, grid.origin.y + grid.height * grid.cell_size)
    im = ax.imshow(grid.as_array(), origin="lower", extent=extent,
                   vmin=0.0, vmax=1.0, cmap="viridis", interpolation="nearest")
    fig.colorbar(im, ax=ax, label="best detection score")

    if layout is not None:
        for z in layout.zones:
            r = z.rect
            ax.add_patch(Rectangle((r.x_min, r.y_min), r.width, r.height,
                                   fill=False, lw=0.8, ls="--",
                                   edgecolor=ZONE_COLORS.get(z.kind.value, "k")))
        for nid, p in layout.nav_nodes.items():
            ax.plot(p.x, p.y, ".", color="white", ms=3)
    for cam in cameras:
        ax.add_patch(Wedge((cam.position.x, cam.position.y), cam.max_range_m,
                           cam.pan_deg - cam.fov_deg / 2,
                           cam.pan_deg + cam.fov_deg / 2,
                           width=cam.max_range_m - cam.min_range_m,
                           alpha=0.2, color="red"))
        ax.plot(cam.position.x, cam.position.y, "^", color="red", ms=6)
        ax.annotate(cam.id, (cam.position.x, cam.position.y), fontsize=6,
                    textcoords="offset points", xytext=(3, 3), color="red")

    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_title("Camera coverage")
    ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _grouped_bars(ax, presets: list[str], groups: list[str],
                  values: dict[str, list[float]],
                  errors: dict[str, list[float]] | None = None) -> None:
    n_groups = len(groups)
    bar_w = 0.8 / max(1, n_groups)
    for gi, group in enumerate(groups):
        xs = [i + gi * bar_w for i in range(len(presets))]
        err = errors[group] if errors else None
        ax.bar(xs, values[group], width=bar_w, label=group, yerr=err, capsize=2)
    ax.set_xticks([i + 0.4 - bar_w / 2 for i in range(len(presets))])
    ax.set_xticklabels([PRESET_LABELS.get(p, p) for p in presets])
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("detection accuracy")
    ax.legend(fontsize=8)
    ax.grid(axis="y", alpha=0.3)


def save_report_figures(report: ExperimentReport, outdir: str | Path) -> list[Path]:
    """Accuracy-by-period and accuracy-by-scenario charts for the report."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    presets = report.presets()
    written: list[Path] = []

    periods = report.periods()
    fig, ax = plt.subplots(figsize=(7, 4))
    values = {OVERALL: [report.overall(p).accuracy for p in presets]}
    errors = {OVERALL: [report.overall(p).ci_half_width for p in presets]}
    for period in periods:
        values[period] = [report.by_period(p, period).accuracy for p in presets]
        errors[period] = [report.by_period(p, period).ci_half_width for p in presets]
    _grouped_bars(ax, presets, [OVERALL] + periods, values, errors)
    ax.set_title("Detection accuracy by camera preset and time of day")
    fig.tight_layout()
    p1 = outdir / "accuracy_by_period.png"
    fig.savefig(p1, dpi=150)
    plt.close(fig)
    written.append(p1)

    scenarios = report.scenarios()
    fig, ax = plt.subplots(figsize=(7, 4))
    groups = [f"Scenario {s}" for s in scenarios]
    values = {g: [report.by_scenario(p, s).accuracy for p in presets]
              for g, s in zip(groups, scenarios)}
    errors = {g: [report.by_scenario(p, s).ci_half_width for p in presets]
              for g, s in zip(groups, scenarios)}
    _grouped_bars(ax, presets, groups, values, errors)
    ax.set_title("Detection accuracy by camera preset and route scenario")
    fig.tight_layout()
    p2 = outdir / "accuracy_by_scenario.png"
    fig.savefig(p2, dpi=150)
    plt.close(fig)
    written.append(p2)
    return written


def save_comparison_figure(rows: list[ComparisonRow], path: str | Path) -> Path:
    """Bar chart of deltas between measured and reference accuracy."""
    path = Path(path)
    labels = [f"{PRESET_LABELS.get(r.preset, r.preset)}\n{r.column}" for r in rows]
    deltas = [r.delta for r in rows]
    colors = ["#d62728" if r.flagged else "#2ca02c" for r in rows]
    fig, ax = plt.subplots(figsize=(max(7, 0.55 * len(rows)), 4))
    ax.bar(range(len(rows)), deltas, color=colors)
    ax.axhline(0.0, color="k", lw=0.8)
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(labels, fontsize=6, rotation=45, ha="right")
    ax.set_ylabel("accuracy delta vs reference")
    ax.set_title("Deviation from the reference accuracy table")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_trace_figure(best_so_far: list[float], path: str | Path) -> Path:
    """Best-so-far objective over optimizer evaluations."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(range(len(best_so_far)), best_so_far, drawstyle="steps-post")
    ax.set_xlabel("evaluation")
    ax.set_ylabel("best objective")
    ax.set_title("Optimization progress")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
