"""Command-line interface.

Exit codes: 0 on success, 1 on validation/usage errors, 2 on I/O errors.
Report-producing subcommands write figures next to the delimited output
when given an output directory.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .detection import (
    DetectionThreshold,
    DetectionWeights,
    NormalizationBounds,
    SamplerConfig,
    calibrate_exceedance,
    calibrate_weights,
)
from .distributions import NormalSpec
from .errors import TwinwatchError
from .experiments import (
    ExperimentPlan,
    compare_to_reference,
    export_report,
    load_report,
    report_to_csv,
    report_to_markdown,
    run_experiment,
)
from .heatmap import compute_heatmap
from .optimizer import FreeParams, ObjectiveConfig, OptimizationProblem, optimize
from .simulation import SimConfig, TimeOfDay, run_simulation
from .station import builtin_preset, default_layout_path, load_layout


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise _UsageError(f"{message}\n\n{self.format_usage()}")


def _parse_weights(text: str) -> DetectionWeights:
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 3:
        raise TwinwatchError("weights must be three comma-separated numbers")
    return DetectionWeights(*parts)


def _parse_periods(text: str) -> tuple[TimeOfDay, ...]:
    return tuple(TimeOfDay.from_name(p.strip()) for p in text.split(","))


def _parse_scenarios(text: str) -> tuple[int, ...]:
    return tuple(int(s) for s in text.split(","))


def _layout(args):
    return load_layout(args.layout if args.layout else default_layout_path())


def _outdir(args) -> Path | None:
    if not args.out:
        return None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def build_parser() -> _Parser:
    parser = _Parser(prog="twinwatch",
                     description="Metro-station digital twin toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="command")

    def common(p):
        p.add_argument("--layout", help="layout JSON path (default: shipped station)")
        p.add_argument("--seed", type=int, default=0, help="master RNG seed")
        p.add_argument("--mode", choices=["geometric", "stochastic"],
                       default=None, help="observation mode")
        p.add_argument("--preset", default="Base", help="camera preset name")
        p.add_argument("--out", help="output path (directory for reports/figures)")
        p.add_argument("--format", choices=["csv", "json", "markdown"],
                       default="markdown", dest="fmt", help="report format")

    p = sub.add_parser("simulate", help="run one simulation and summarize it")
    common(p)
    p.add_argument("--period", default="Morning")
    p.add_argument("--scenario", type=int, choices=[1, 2, 3], default=None,
                   help="fix all suspects to one route scenario")
    p.add_argument("--duration-min", type=float, default=60.0)

    p = sub.add_parser("experiment", help="run the accuracy experiment matrix")
    common(p)
    p.add_argument("--presets", default=None,
                   help="comma-separated preset names (overrides --preset)")
    p.add_argument("--periods", default="Morning,Midday,Afternoon")
    p.add_argument("--scenarios", default="1,2,3")
    p.add_argument("--target", type=int, default=1000,
                   help="suspect trajectories per cell")
    p.add_argument("--weights", default=None, help="w_a,w_d,w_n")
    p.add_argument("--threshold", type=float, default=0.45)
    p.add_argument("--replication-min", type=float, default=60.0)
    p.add_argument("--suspect-rate", type=float, default=None,
                   help="override mean suspects per hour")
    p.add_argument("--no-traffic", action="store_true",
                   help="suppress background passenger traffic")
    p.add_argument("--bernoulli-p", type=float, default=None,
                   help="replace stochastic draws with Bernoulli(p) exceedance")
    p.add_argument("--compare", action="store_true",
                   help="print deltas against the reference table")
    p.add_argument("--no-figures", action="store_true")

    p = sub.add_parser("calibrate",
                       help="invert the camera-count law and fit weights")
    common(p)
    p.add_argument("--target", type=float, required=True,
                   help="target overall detection rate")
    p.add_argument("--trajectories", type=int, default=10_000)
    p.add_argument("--threshold", type=float, default=0.45)
    p.add_argument("--skip-weights", action="store_true",
                   help="only compute the per-camera exceedance")

    p = sub.add_parser("optimize", help="search camera pans for best accuracy")
    common(p)
    p.add_argument("--budget", type=int, default=200)
    p.add_argument("--restarts", type=int, default=2)
    p.add_argument("--periods", default="Morning")
    p.add_argument("--scenarios", default="1,2,3")
    p.add_argument("--replications", type=int, default=2)
    p.add_argument("--duration-min", type=float, default=10.0)
    p.add_argument("--suspect-rate", type=float, default=60.0)

    p = sub.add_parser("heatmap", help="compute the coverage heatmap")
    common(p)
    p.add_argument("--cell-size", type=float, default=0.5)
    p.add_argument("--weights", default=None, help="w_a,w_d,w_n")

    p = sub.add_parser("report",
                       help="re-export a stored report with figures")
    common(p)
    p.add_argument("--in", dest="input", required=True, help="report JSON path")
    p.add_argument("--compare", action="store_true")
    p.add_argument("--no-figures", action="store_true")

    p = sub.add_parser("serve", help="run the HTTP service")
    common(p)
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--static-dir", default=None,
                   help="serve a planner UI build from this directory")

    return parser


def cmd_simulate(args) -> int:
    layout = _layout(args)
    cfg = SimConfig(
        preset=builtin_preset(args.preset, layout),
        mode=args.mode or "geometric",
        seed=args.seed,
        period=TimeOfDay.from_name(args.period),
        scenario=args.scenario,
    )
    out = run_simulation(layout, cfg, args.duration_min * 60.0)
    c = out.passenger_counts
    suspects = out.suspect_trajectories()
    detected = sum(t.detected for t in suspects)
    print(f"period={out.period} mode={out.mode} seed={out.rng_seed} "
          f"duration={out.duration:.0f}s")
    print(f"spawned={c.spawned} (entrance={c.spawned_entrance} "
          f"exit_flow={c.spawned_exit_flow} suspects={c.spawned_suspects}) "
          f"departed={c.departed} in_transit={c.in_transit}")
    print(f"services: gates={c.gate_services} machines={c.machine_services}")
    if suspects:
        print(f"suspects detected: {detected}/{len(suspects)} "
              f"({detected / len(suspects):.3f})")
    if args.out:
        path = Path(args.out)
        if path.suffix != ".json":
            path.mkdir(parents=True, exist_ok=True)
            path = path / "simulation.json"
        path.write_text(json.dumps(out.to_dict(), indent=2) + "\n",
                        encoding="utf-8")
        print(f"wrote {path}")
    return 0


def _experiment_plan(args, layout) -> ExperimentPlan:
    presets = (tuple(s.strip() for s in args.presets.split(","))
               if args.presets else (args.preset,))
    overrides: dict = {}
    if args.suspect_rate is not None:
        overrides["suspects_per_hour"] = NormalSpec(args.suspect_rate, 1.0,
                                                    min_clamp=0.0)
    if args.no_traffic:
        from .simulation import TrafficTable
        overrides["traffic"] = TrafficTable.negligible()
    if args.bernoulli_p is not None:
        overrides["bernoulli_exceedance_p"] = args.bernoulli_p
    return ExperimentPlan(
        presets=presets,
        periods=_parse_periods(args.periods),
        scenarios=_parse_scenarios(args.scenarios),
        target_suspects_per_cell=args.target,
        mode=args.mode or "stochastic",
        base_seed=args.seed,
        weights=_parse_weights(args.weights) if args.weights
        else DetectionWeights.equal(),
        threshold=DetectionThreshold(args.threshold),
        replication_minutes=args.replication_min,
        sim_overrides=overrides,
    )


def _emit_report(report, args, compare: bool) -> None:
    fmt = args.fmt
    text = {"markdown": report_to_markdown,
            "csv": report_to_csv,
            "json": lambda r: json.dumps(r.to_dict(), indent=2) + "\n"}[fmt](report)
    print(text, end="")
    comparison = None
    if compare:
        comparison = compare_to_reference(report)
        print("\ndelta vs reference (flag: |delta| > 0.03):")
        for row in comparison:
            flag = " *" if row.flagged else ""
            print(f"  {row.preset:8s} {row.column:12s} ours={row.ours:.3f} "
                  f"ref={row.reference:.2f} delta={row.delta:+.3f}{flag}")
    outdir = _outdir(args)
    if outdir is not None:
        ext = {"markdown": "md", "csv": "csv", "json": "json"}[fmt]
        export_report(report, fmt, outdir / f"report.{ext}")
        export_report(report, "json", outdir / "report.json")
        written = [outdir / f"report.{ext}", outdir / "report.json"]
        if not getattr(args, "no_figures", False):
            from .figures import save_comparison_figure, save_report_figures
            written += save_report_figures(report, outdir)
            if comparison:
                written.append(save_comparison_figure(
                    comparison, outdir / "reference_delta.png"))
        for w in dict.fromkeys(written):
            print(f"wrote {w}")


def cmd_experiment(args) -> int:
    layout = _layout(args)
    plan = _experiment_plan(args, layout)
    report = run_experiment(layout, plan)
    _emit_report(report, args, args.compare)
    return 0


def cmd_calibrate(args) -> int:
    layout = _layout(args)
    preset = builtin_preset(args.preset, layout)
    m = len(preset.cameras)
    p_star = calibrate_exceedance(args.target, m)
    print(f"preset={args.preset} cameras={m} target_rate={args.target}")
    print(f"per-camera exceedance p* = {p_star:.6f}")
    result = None
    if not args.skip_weights:
        sampler = SamplerConfig(trajectories=args.trajectories, seed=args.seed)
        result = calibrate_weights(args.target, preset, sampler,
                                   DetectionThreshold(args.threshold))
        w = result.weights
        status = "converged" if result.converged else "NOT CONVERGED"
        print(f"weights: w_a={w.w_a:.4f} w_d={w.w_d:.4f} w_n={w.w_n:.4f} "
              f"({status}, {result.evaluations} candidates)")
        print(f"achieved rate = {result.achieved_rate:.4f} "
              f"(target {result.target_rate:.4f})")
    if args.out:
        out = {"preset": args.preset, "cameras": m, "target": args.target,
               "exceedance_p": p_star}
        if result is not None:
            out["weights"] = result.weights.to_dict()
            out["achieved_rate"] = result.achieved_rate
            out["converged"] = result.converged
        path = Path(args.out)
        if path.suffix != ".json":
            path.mkdir(parents=True, exist_ok=True)
            path = path / "calibration.json"
        path.write_text(json.dumps(out, indent=2) + "\n", encoding="utf-8")
        print(f"wrote {path}")
    return 0


def cmd_optimize(args) -> int:
    layout = _layout(args)
    preset = builtin_preset(args.preset, layout)
    problem = OptimizationProblem(
        layout=layout,
        cameras=preset.cameras,
        free={c.id: FreeParams(pan_bounds=(0.0, 360.0)) for c in preset.cameras},
        objective=ObjectiveConfig(
            mode=args.mode or "geometric",
            periods=_parse_periods(args.periods),
            scenarios=_parse_scenarios(args.scenarios),
            replications=args.replications,
            seed=args.seed,
            duration_s=args.duration_min * 60.0,
            sim_overrides={"suspects_per_hour": NormalSpec(args.suspect_rate, 1.0,
                                                           min_clamp=0.0)},
        ),
        budget=args.budget,
        restarts=args.restarts,
    )
    result = optimize(problem)
    print(f"initial objective = {result.initial_objective:.4f}")
    print(f"final objective   = {result.final_objective:.4f} "
          f"({'converged' if result.converged else 'budget exhausted'}, "
          f"{result.evaluations} evaluations)")
    for cam in result.cameras:
        print(f"  {cam.id}: pan={cam.pan_deg:.1f} deg at "
              f"({cam.position.x:.2f}, {cam.position.y:.2f})")
    outdir = _outdir(args)
    if outdir is not None:
        (outdir / "optimized.json").write_text(
            json.dumps(result.to_dict(), indent=2) + "\n", encoding="utf-8")
        from .figures import save_trace_figure
        save_trace_figure(result.trace.best_so_far(), outdir / "trace.png")
        print(f"wrote {outdir / 'optimized.json'}")
        print(f"wrote {outdir / 'trace.png'}")
    return 0


def cmd_heatmap(args) -> int:
    layout = _layout(args)
    preset = builtin_preset(args.preset, layout)
    weights = (_parse_weights(args.weights) if args.weights
               else DetectionWeights.equal())
    grid = compute_heatmap(layout.bounds, preset.cameras, weights,
                           NormalizationBounds(), cell_size=args.cell_size)
    nonzero = sum(1 for v in grid.values if v > 0)
    print(f"grid {grid.width}x{grid.height} cell={grid.cell_size}m "
          f"covered={nonzero / len(grid.values):.1%}")
    outdir = _outdir(args)
    if outdir is not None:
        (outdir / "heatmap.json").write_text(
            json.dumps(grid.to_dict()) + "\n", encoding="utf-8")
        from .figures import save_heatmap_figure
        save_heatmap_figure(grid, outdir / "heatmap.png", layout=layout,
                            cameras=preset.cameras)
        print(f"wrote {outdir / 'heatmap.json'}")
        print(f"wrote {outdir / 'heatmap.png'}")
    return 0


def cmd_report(args) -> int:
    report = load_report(args.input)
    _emit_report(report, args, args.compare)
    return 0


def cmd_serve(args) -> int:
    from .service import serve
    serve(layout_path=args.layout, host=args.host, port=args.port,
          static_dir=args.static_dir)
    return 0


_COMMANDS = {
    "simulate": cmd_simulate,
    "experiment": cmd_experiment,
    "calibrate": cmd_calibrate,
    "optimize": cmd_optimize,
    "heatmap": cmd_heatmap,
    "report": cmd_report,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help()
            return 1
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (TwinwatchError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
