import json

import pytest

from twinwatch.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestBasics:
    def test_no_command_prints_help(self, capsys):
        code, out, err = run_cli(capsys)
        assert code == 1
        assert "usage" in out.lower()

    def test_unknown_subcommand_exits_one_with_usage(self, capsys):
        code, out, err = run_cli(capsys, "frobnicate")
        assert code == 1
        assert "usage" in err.lower()

    def test_unknown_flag_exits_one(self, capsys):
        code, out, err = run_cli(capsys, "simulate", "--bogus")
        assert code == 1

    def test_missing_layout_file_is_io_error(self, capsys):
        code, out, err = run_cli(capsys, "simulate", "--layout", "/nope.json",
                                 "--duration-min", "1")
        assert code in (1, 2)
        assert err


class TestSimulate:
    def test_summary_and_output_file(self, capsys, tmp_path):
        out_file = tmp_path / "sim.json"
        code, out, err = run_cli(capsys, "simulate", "--seed", "5",
                                 "--duration-min", "10", "--mode", "stochastic",
                                 "--out", str(out_file))
        assert code == 0
        assert "spawned=" in out
        doc = json.loads(out_file.read_text())
        assert doc["rng_seed"] == 5
        assert doc["passenger_counts"]["spawned"] == len(doc["trajectories"])


class TestExperiment:
    def test_markdown_table_shape(self, capsys):
        code, out, err = run_cli(
            capsys, "experiment", "--presets", "Base,Model11",
            "--periods", "Morning", "--scenarios", "3", "--target", "50",
            "--mode", "stochastic", "--seed", "9", "--no-traffic",
            "--suspect-rate", "200", "--bernoulli-p", "0.2")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0].startswith("| Model | Overall | Morning | Scenario 3 |")
        assert lines[2].startswith("| Base |")
        assert lines[3].startswith("| Model 11 |")

    def test_outputs_report_and_figures(self, capsys, tmp_path):
        outdir = tmp_path / "exp"
        code, out, err = run_cli(
            capsys, "experiment", "--presets", "Base", "--periods", "Morning",
            "--scenarios", "3", "--target", "30", "--mode", "stochastic",
            "--seed", "9", "--no-traffic", "--suspect-rate", "200",
            "--bernoulli-p", "0.2", "--format", "csv", "--out", str(outdir))
        assert code == 0
        assert (outdir / "report.csv").exists()
        assert (outdir / "report.json").exists()
        png = (outdir / "accuracy_by_period.png").read_bytes()
        assert png[:8] == b"\x89PNG\r\n\x1a\n"
        assert (outdir / "accuracy_by_scenario.png").exists()

    def test_empty_scenarios_is_validation_error(self, capsys):
        code, out, err = run_cli(capsys, "experiment", "--scenarios", "",
                                 "--target", "5")
        assert code == 1
        assert "error" in err.lower()


class TestCalibrate:
    def test_prints_exceedance_and_weights(self, capsys):
        code, out, err = run_cli(capsys, "calibrate", "--target", "0.74",
                                 "--preset", "Base", "--trajectories", "4000")
        assert code == 0
        assert "0.20109" in out  # p* = 1 - 0.26^(1/6) = 0.201094...
        assert "w_a=" in out and "w_d=" in out and "w_n=" in out
        assert "achieved rate" in out

    def test_out_of_range_target_fails(self, capsys):
        code, out, err = run_cli(capsys, "calibrate", "--target", "1.0",
                                 "--preset", "Base", "--skip-weights")
        assert code == 1


class TestHeatmapAndReport:
    def test_heatmap_writes_json_and_png(self, capsys, tmp_path):
        outdir = tmp_path / "hm"
        code, out, err = run_cli(capsys, "heatmap", "--preset", "Base",
                                 "--cell-size", "1.0", "--out", str(outdir))
        assert code == 0
        doc = json.loads((outdir / "heatmap.json").read_text())
        assert doc["width"] == 60
        assert (outdir / "heatmap.png").read_bytes()[:4] == b"\x89PNG"

    def test_report_reexports_stored_report(self, capsys, tmp_path):
        outdir = tmp_path / "exp"
        run_cli(capsys, "experiment", "--presets", "Base", "--periods",
                "Morning", "--scenarios", "3", "--target", "30",
                "--mode", "stochastic", "--seed", "9", "--no-traffic",
                "--suspect-rate", "200", "--bernoulli-p", "0.2",
                "--format", "json", "--out", str(outdir))
        outdir2 = tmp_path / "re"
        code, out, err = run_cli(capsys, "report", "--in",
                                 str(outdir / "report.json"),
                                 "--format", "markdown", "--out", str(outdir2))
        assert code == 0
        assert (outdir2 / "report.md").read_text().startswith("| Model |")
        assert (outdir2 / "accuracy_by_period.png").exists()


class TestOptimizeCommand:
    def test_small_stochastic_run(self, capsys, tmp_path):
        outdir = tmp_path / "opt"
        code, out, err = run_cli(
            capsys, "optimize", "--preset", "Base", "--mode", "stochastic",
            "--budget", "8", "--restarts", "1", "--scenarios", "3",
            "--replications", "1", "--duration-min", "5",
            "--suspect-rate", "60", "--out", str(outdir))
        assert code == 0
        assert "final objective" in out
        doc = json.loads((outdir / "optimized.json").read_text())
        assert doc["final_objective"] >= doc["initial_objective"]
        assert (outdir / "trace.png").exists()
