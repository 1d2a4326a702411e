import json
import logging

import numpy as np
import pytest

from src.config.presets import TrialConfig
from src.config.settings import reset_settings
from src.errors import ArtifactError, LostLineError
from src.harness.artifacts import (
    SUMMARY_JSON,
    TRIAL_COLUMNS,
    TRIAL_CSV,
    WEIGHT_DISTANCE_CSV,
    WEIGHT_MAP_PGM,
    WEIGHTS_JSON,
    emit,
    load_trial_csv,
    read_pgm,
    write_pgm,
)
from src.harness.metrics import rms
from src.learning.snapshot import WeightSnapshot
from src.harness.trial import STATUS_OK, TrialLog, TrialRunner, reflex_baseline, run, run_trial

N_STEPS = 150


@pytest.fixture(scope="module")
def learning_log() -> TrialLog:
    return run_trial(TrialConfig(eta=1e-2, seed=1, n_steps=N_STEPS))


def test_learning_trial_gets_reflex_baseline(learning_log: TrialLog) -> None:
    assert learning_log.status == STATUS_OK
    baseline = reflex_baseline(learning_log.config)
    assert learning_log.reflex_baseline == baseline
    assert baseline > 0.0


def test_reflex_trial_has_no_success_step() -> None:
    log = run_trial(TrialConfig(n_steps=N_STEPS, reflex_only=True))
    assert log.success_step is None
    assert log.reflex_baseline == pytest.approx(log.mean_abs_error)
    assert np.array_equal(log.weight_distances, np.zeros_like(log.weight_distances))


def test_reflex_baseline_ignores_seed() -> None:
    assert reflex_baseline(TrialConfig(seed=0, n_steps=80)) == reflex_baseline(TrialConfig(seed=5, n_steps=80))


def test_reflex_baseline_follows_off_track_limit_setting(monkeypatch) -> None:
    config = TrialConfig(eta=1e-2, n_steps=200, overrides={"steering": {"alpha": 0.0}})
    monkeypatch.setenv("OFF_TRACK_LIMIT", "1000")
    reset_settings()
    assert reflex_baseline(config) >= 0.0
    monkeypatch.setenv("OFF_TRACK_LIMIT", "5")
    reset_settings()
    with pytest.raises(LostLineError):
        reflex_baseline(config)


def test_emit_writes_all_artifacts(tmp_path, learning_log: TrialLog) -> None:
    written = emit(learning_log, tmp_path / "trial")
    assert [p.name for p in written] == [TRIAL_CSV, WEIGHT_MAP_PGM, WEIGHT_DISTANCE_CSV, WEIGHTS_JSON, SUMMARY_JSON]
    assert all(p.exists() for p in written)


def test_trial_csv_round_trips_exactly(tmp_path, learning_log: TrialLog) -> None:
    emit(learning_log, tmp_path)
    header = (tmp_path / TRIAL_CSV).read_text().splitlines()[0]
    assert header == ",".join(TRIAL_COLUMNS)
    columns = load_trial_csv(tmp_path / TRIAL_CSV)
    assert len(columns["k"]) == N_STEPS
    assert abs(rms(columns["e_c"]) - learning_log.rms_error) <= 1e-9
    assert np.array_equal(columns["e_c"], learning_log.e_c)


def test_same_config_gives_byte_identical_csv(tmp_path) -> None:
    config = TrialConfig(eta=1e-2, seed=2, n_steps=60)
    emit(run_trial(config), tmp_path / "a")
    emit(run_trial(config), tmp_path / "b")
    assert (tmp_path / "a" / TRIAL_CSV).read_bytes() == (tmp_path / "b" / TRIAL_CSV).read_bytes()


def test_weight_map_pgm(tmp_path, learning_log: TrialLog) -> None:
    emit(learning_log, tmp_path)
    data = (tmp_path / WEIGHT_MAP_PGM).read_bytes()
    assert data.startswith(b"P5\n12 40\n255\n")
    pixels = read_pgm(tmp_path / WEIGHT_MAP_PGM)
    assert pixels.shape == (40, 12)
    assert pixels.max() == 255


def test_write_pgm_scales_to_full_range(tmp_path) -> None:
    path = write_pgm(np.array([[1.0, -2.0], [3.0, 4.0]]), tmp_path / "m.pgm")
    assert read_pgm(path).tolist() == [[64, 128], [191, 255]]
    flat = write_pgm(np.zeros((2, 3)), tmp_path / "zero.pgm")
    assert read_pgm(flat).tolist() == [[0, 0, 0], [0, 0, 0]]
    with pytest.raises(ArtifactError):
        write_pgm(np.zeros(3), tmp_path / "bad.pgm")


def test_weight_snapshot_restores_final_network(tmp_path, learning_log: TrialLog) -> None:
    emit(learning_log, tmp_path)
    net = WeightSnapshot.load(tmp_path / WEIGHTS_JSON).to_network()
    assert net.layer_sizes == [12, 6, 1]
    assert np.array_equal(net.first_layer_map(), learning_log.final_weight_map)


def test_normalized_weight_distances_are_bounded(tmp_path, learning_log: TrialLog) -> None:
    normalized = learning_log.normalized_weight_distances()
    assert normalized.shape == (N_STEPS, 3)
    assert np.all((normalized >= 0.0) & (normalized <= 1.0))
    emit(learning_log, tmp_path)
    lines = (tmp_path / WEIGHT_DISTANCE_CSV).read_text().splitlines()
    assert lines[0] == "k,d_0,d_1,d_2"
    assert len(lines) == N_STEPS + 1


def test_summary_json(tmp_path, learning_log: TrialLog) -> None:
    emit(learning_log, tmp_path)
    summary = json.loads((tmp_path / SUMMARY_JSON).read_text())
    assert summary["status"] == "ok"
    assert summary["n_steps_completed"] == N_STEPS
    assert summary["config"]["eta"] == 1e-2
    assert summary["preset"]["name"] == "sim16"
    assert summary["rms"] == pytest.approx(learning_log.rms_error)


def test_empty_trial_cannot_be_emitted(tmp_path, learning_log: TrialLog) -> None:
    empty = TrialLog(
        config=learning_log.config,
        preset=learning_log.preset,
        steps=[],
        weight_distances=np.zeros((0, 3)),
        final_weight_map=learning_log.final_weight_map,
    )
    with pytest.raises(ArtifactError):
        emit(empty, tmp_path)


def test_run_matches_run_trial(learning_log: TrialLog) -> None:
    again = run(learning_log.config)
    assert again.steps == learning_log.steps
    assert again.success_step == learning_log.success_step


def test_trial_end_logs_step_stats(caplog) -> None:
    with caplog.at_level(logging.INFO, logger="src.harness.trial"):
        TrialRunner(TrialConfig(n_steps=20, reflex_only=True)).run()
    assert "20/20 steps run, 0 off-track steps" in caplog.text
