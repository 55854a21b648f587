import json

import numpy as np
import pytest
from click.testing import CliRunner

from app.cli import cli, main
from app.models.response import CSV_COLUMNS

HEADER = "t,mass,min_u,max_u,l2_dist,entropy,entropy_dissipation,energy_dissipation,lyapunov,theta_linf,a1_norm,a3_norm,dt_used"


@pytest.fixture
def runner():
    return CliRunner()


def test_csv_header_is_fixed():
    assert ",".join(CSV_COLUMNS) == HEADER


def test_presets_table(runner):
    result = runner.invoke(cli, ["presets"])
    assert result.exit_code == 0
    lines = result.output.strip().splitlines()
    assert len(lines) == 6
    wiener = next(line for line in lines if line.startswith("wiener_small"))
    assert "|a| < 0.1" in wiener


def test_simulate_constant_rows_are_identical(runner, tmp_path):
    out = tmp_path / "constant.csv"
    result = runner.invoke(
        cli,
        ["simulate", "--preset", "constant", "--n", "16", "--t_end", "0.05", "--output", str(out)],
    )
    assert result.exit_code == 0, result.output
    assert "ReachedTEnd" in result.output

    text = out.read_text()
    assert text.splitlines()[0] == HEADER
    rows = np.loadtxt(out, delimiter=",", skiprows=1)
    assert rows.shape == (6, 13)
    steady = rows[:, 1:12]
    np.testing.assert_array_equal(steady, np.broadcast_to(steady[0], steady.shape))
    np.testing.assert_allclose(rows[:, 0], [0.0, 0.01, 0.02, 0.03, 0.04, 0.05], atol=1e-15)


def test_simulate_writes_seventeen_digit_floats(runner, tmp_path):
    out = tmp_path / "bump.csv"
    result = runner.invoke(
        cli,
        ["simulate", "--preset", "cosine_bump(0.5)", "--n", "16", "--t_end", "0.02", "-o", str(out)],
    )
    assert result.exit_code == 0, result.output
    first_row = out.read_text().splitlines()[1].split(",")
    mass = float(first_row[1])
    assert mass == pytest.approx(2 * np.pi, rel=1e-15)
    assert len(first_row) == 13


def test_simulate_json_output(runner, tmp_path):
    out = tmp_path / "run.json"
    result = runner.invoke(
        cli,
        ["simulate", "--n", "16", "--t_end", "0.02", "--format", "json", "--output", str(out)],
    )
    assert result.exit_code == 0, result.output
    payload = json.loads(out.read_text())
    assert payload["summary"]["termination"] == "ReachedTEnd"
    assert len(payload["records"]) == 3
    assert "slope_linf" in payload["records"][0]
    assert "generated_at" not in payload


def test_simulate_outputs_are_deterministic(runner, tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        runner.invoke(cli, ["simulate", "--preset", "two_mode(0.3, 0.2)", "--n", "16", "--t_end", "0.02", "-o", str(path)])
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_simulate_reads_config_file_and_flags_override(runner, tmp_path):
    config = tmp_path / "run.cfg"
    config.write_text(
        "# small run\n"
        "model = log_diffusion\n"
        "n = 16\n"
        "t_end = 0.5   # overridden below\n"
        "preset = cosine_bump(0.3)\n"
    )
    out = tmp_path / "out.csv"
    result = runner.invoke(
        cli, ["simulate", "--config", str(config), "--t_end", "0.02", "--output", str(out)]
    )
    assert result.exit_code == 0, result.output
    rows = np.loadtxt(out, delimiter=",", skiprows=1)
    assert rows[-1, 0] == pytest.approx(0.02)


def test_simulate_reads_initial_data_file(runner, tmp_path):
    x = 2 * np.pi * np.arange(16) / 16
    data = tmp_path / "u0.txt"
    np.savetxt(data, 1.0 + 0.5 * np.cos(x))
    out = tmp_path / "out.csv"
    result = runner.invoke(
        cli, ["simulate", "--initial_data", str(data), "--n", "16", "--t_end", "0.02", "-o", str(out)]
    )
    assert result.exit_code == 0, result.output
    rows = np.loadtxt(out, delimiter=",", skiprows=1)
    assert rows[0, 2] == pytest.approx(0.5)

    short = tmp_path / "short.txt"
    np.savetxt(short, np.ones(8))
    result = runner.invoke(cli, ["simulate", "--initial_data", str(short), "--n", "16"])
    assert result.exit_code == 1
    assert "expected n = 16" in result.output


def test_simulate_rejects_bad_grid_size(runner):
    result = runner.invoke(cli, ["simulate", "--n", "6"])
    assert result.exit_code == 1
    assert "n" in result.output
    assert "power of two" in result.output


def test_simulate_rejects_unknown_config_key(runner, tmp_path):
    config = tmp_path / "bad.cfg"
    config.write_text("resolution = 64\n")
    result = runner.invoke(cli, ["simulate", "--config", str(config)])
    assert result.exit_code == 1
    assert "resolution" in result.output


def test_simulate_rejects_regularization_for_other_models(runner):
    result = runner.invoke(cli, ["simulate", "--n", "16", "--epsilon", "0.1"])
    assert result.exit_code == 1


def test_simulate_breakdown_keeps_partial_output(runner, tmp_path):
    out = tmp_path / "partial.csv"
    result = runner.invoke(
        cli,
        ["simulate", "--n", "16", "--t_end", "1", "--max_steps", "3", "--record_every", "0.001", "-o", str(out)],
    )
    assert result.exit_code == 2
    assert "StepLimit" in result.output
    assert out.read_text().startswith(HEADER)


def test_fuzz_passes_and_writes_report(runner, tmp_path):
    report = tmp_path / "fuzz.csv"
    result = runner.invoke(
        cli,
        ["fuzz", "--trials", "5", "--n", "64", "--max_mode", "8", "--report", str(report), "--workers", "2"],
    )
    assert result.exit_code == 0, result.output
    lines = report.read_text().splitlines()
    assert lines[0] == "index,seed,margin_1,margin_2,degenerate"
    assert [line.split(",")[0] for line in lines[1:]] == ["0", "1", "2", "3", "4"]


def test_fuzz_impossible_tolerance_exits_3(runner):
    result = runner.invoke(
        cli, ["fuzz", "--trials", "2", "--seed0", "40", "--n", "64", "--max_mode", "4", "--tolerance", "-1"]
    )
    assert result.exit_code == 3
    assert "seed=40" in result.output


def test_fuzz_rejects_too_many_modes(runner):
    result = runner.invoke(cli, ["fuzz", "--n", "64", "--max_mode", "32"])
    assert result.exit_code == 1


def test_converge_small_study(runner):
    result = runner.invoke(
        cli,
        [
            "converge", "--n", "32", "--t_end", "0.02",
            "--level", "1e-2", "--level", "1e-3",
            "--threshold", "1e-2", "--resolution_tolerance", "1e-3",
        ],
    )
    assert result.exit_code == 0, result.output
    assert "monotone: True" in result.output


def test_unknown_subcommand_exits_1():
    assert main(["bogus"]) == 1


def test_main_returns_command_exit_codes(tmp_path):
    assert main(["presets"]) == 0
    assert main(["simulate", "--n", "12"]) == 1


def test_simulate_rejects_initial_data_at_the_floor(runner, tmp_path):
    x = 2 * np.pi * np.arange(16) / 16
    data = tmp_path / "touching.txt"
    np.savetxt(data, 1.0 + np.cos(x))
    result = runner.invoke(cli, ["simulate", "--initial_data", str(data), "--n", "16", "--t_end", "0.02"])
    assert result.exit_code == 1
    assert "initial_data" in result.output
    assert "positivity floor" in result.output
