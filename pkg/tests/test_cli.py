import json

import pytest

from src.cli import gradcheck, run, sweep
from src.harness.artifacts import SUMMARY_JSON, TRIAL_CSV


def exit_code(main, argv: list[str]) -> int:
    with pytest.raises(SystemExit) as excinfo:
        main(argv)
    return excinfo.value.code


def test_gradcheck_command_passes(capsys) -> None:
    assert exit_code(gradcheck.main, ["--trials", "1"]) == 0
    assert "GRADIENT CHECK" in capsys.readouterr().out


def test_run_command_writes_artifacts(tmp_path) -> None:
    out = tmp_path / "trial"
    assert exit_code(run.main, ["--steps", "30", "--eta", "0.01", "--seed", "2", "--out", str(out)]) == 0
    assert (out / TRIAL_CSV).exists()
    summary = json.loads((out / SUMMARY_JSON).read_text())
    assert summary["config"]["seed"] == 2


def test_run_command_defaults_output_under_output_root(tmp_path) -> None:
    assert exit_code(run.main, ["--steps", "10", "--reflex-only"]) == 0
    assert (tmp_path / "runs" / "sim16_reflex_seed0" / TRIAL_CSV).exists()
    assert list((tmp_path / "logs").glob("idl_run_*.log"))


def test_run_command_reads_config_file(tmp_path) -> None:
    config = tmp_path / "trial.json"
    config.write_text(json.dumps({"preset": "sim16", "eta": 0.001, "seed": 4, "n_steps": 10}))
    out = tmp_path / "from_file"
    assert exit_code(run.main, ["--config", str(config), "--steps", "12", "--out", str(out)]) == 0
    summary = json.loads((out / SUMMARY_JSON).read_text())
    assert summary["config"]["seed"] == 4
    assert summary["n_steps_completed"] == 12


@pytest.mark.parametrize(
    "argv",
    [
        ["--preset", "nope", "--steps", "5"],
        ["--override", "{not json", "--steps", "5"],
        ["--override", '{"dt": -1}', "--steps", "5"],
        ["--eta", "-1", "--steps", "5"],
    ],
)
def test_bad_configuration_exits_with_config_code(tmp_path, argv: list[str]) -> None:
    assert exit_code(run.main, [*argv, "--out", str(tmp_path / "x")]) == 4


def test_run_command_reports_lost_line(tmp_path) -> None:
    # ground sensors mounted far ahead of the robot never see the line
    override = json.dumps({"off_track_limit": 2, "sensors": {"ground_ahead": 60.0}})
    argv = ["--steps", "10", "--reflex-only", "--override", override, "--out", str(tmp_path / "lost")]
    assert exit_code(run.main, argv) == 2
    assert (tmp_path / "lost" / TRIAL_CSV).exists()


def test_sweep_command(tmp_path) -> None:
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps({"preset": "sim16", "etas": [0.01], "seeds": [0], "n_steps": 20}))
    assert exit_code(sweep.main, ["--grid", str(grid), "--out", str(tmp_path / "sweep")]) == 0
    assert (tmp_path / "sweep" / "sweep_summary.json").exists()


def test_sweep_command_missing_grid(tmp_path) -> None:
    assert exit_code(sweep.main, ["--grid", str(tmp_path / "none.json"), "--out", str(tmp_path / "s")]) == 4
