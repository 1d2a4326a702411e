"""Trial artifacts: step CSV, first-layer weight map (PGM), weight-distance CSV, weight snapshot and JSON summary."""

from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel

from src.errors import ArtifactError
from src.harness.trial import TrialLog

logger = logging.getLogger(__name__)

TRIAL_CSV = "trial.csv"
WEIGHT_MAP_PGM = "weights_layer0.pgm"
WEIGHT_DISTANCE_CSV = "weight_distance.csv"
SUMMARY_JSON = "summary.json"
WEIGHTS_JSON = "weights.json"

TRIAL_COLUMNS = ["k", "e_c", "a_p", "v_left", "v_right", "x", "y", "heading", "on_track"]


class TrialSummary(BaseModel):
    status: str
    error: Optional[str] = None
    diagnostics: Dict[str, Any] = {}
    rms: Optional[float] = None
    mean_abs_error: Optional[float] = None
    success_step: Optional[int] = None
    reflex_baseline: Optional[float] = None
    n_steps_completed: int
    config: Dict[str, Any]
    preset: Dict[str, Any]

    @classmethod
    def from_log(cls, log: TrialLog) -> "TrialSummary":
        return cls(
            status=log.status,
            error=log.error,
            diagnostics=log.diagnostics,
            rms=log.rms_error,
            mean_abs_error=log.mean_abs_error,
            success_step=log.success_step,
            reflex_baseline=log.reflex_baseline,
            n_steps_completed=log.n_steps_completed,
            config=log.config.model_dump(mode="json"),
            preset=log.preset.model_dump(mode="json"),
        )


def _write(path: Path, writer) -> Path:
    try:
        writer(path)
    except OSError as exc:
        raise ArtifactError(path, f"write failed: {exc}") from exc
    logger.info("wrote %s", path)
    return path


def write_trial_csv(log: TrialLog, path: Path) -> Path:
    def dump(target: Path) -> None:
        with open(target, "w", newline="") as handle:
            out = csv.writer(handle, lineterminator="\n")
            out.writerow(TRIAL_COLUMNS)
            for s in log.steps:
                out.writerow(
                    [s.k, repr(s.e_c), repr(s.a_p), repr(s.v_left), repr(s.v_right),
                     repr(s.x), repr(s.y), repr(s.heading), int(s.on_track)]
                )

    return _write(path, dump)


def write_pgm(matrix: np.ndarray, path: Path) -> Path:
    """Binary greyscale (P5); rows follow the matrix rows, values max-normalized to 0..255."""
    values = np.abs(np.asarray(matrix, dtype=float))
    if values.ndim != 2:
        raise ArtifactError(path, f"weight map must be 2D, got shape {values.shape}")
    peak = float(values.max()) if values.size else 0.0
    scaled = values / peak if peak > 0 else np.zeros_like(values)
    pixels = np.rint(scaled * 255.0).astype(np.uint8)
    height, width = pixels.shape

    def dump(target: Path) -> None:
        with open(target, "wb") as handle:
            handle.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
            handle.write(pixels.tobytes())

    return _write(path, dump)


def read_pgm(path: Path) -> np.ndarray:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise ArtifactError(path, f"read failed: {exc}") from exc
    magic, size, maxval, body = data.split(b"\n", 3)
    if magic != b"P5" or maxval != b"255":
        raise ArtifactError(path, "not an 8-bit P5 image")
    width, height = (int(v) for v in size.split())
    return np.frombuffer(body, dtype=np.uint8).reshape(height, width)


def write_weight_distance_csv(log: TrialLog, path: Path) -> Path:
    normalized = log.normalized_weight_distances()

    def dump(target: Path) -> None:
        with open(target, "w", newline="") as handle:
            out = csv.writer(handle, lineterminator="\n")
            out.writerow(["k", *[f"d_{layer}" for layer in range(normalized.shape[1])]])
            for k, row in enumerate(normalized):
                out.writerow([k, *[repr(float(v)) for v in row]])

    return _write(path, dump)


def write_summary(log: TrialLog, path: Path) -> Path:
    summary = TrialSummary.from_log(log)
    return _write(path, lambda target: target.write_text(summary.model_dump_json(indent=2)))


def emit(log: TrialLog, outdir: Path) -> List[Path]:
    """Write the artifacts of ``log`` into ``outdir`` (created if needed).

    The weight snapshot is skipped for logs that carry no final weights.
    """
    outdir = Path(outdir)
    if not log.steps:
        raise ArtifactError(outdir, "trial has no steps to emit")
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ArtifactError(outdir, f"cannot create output directory: {exc}") from exc
    written = [
        write_trial_csv(log, outdir / TRIAL_CSV),
        write_pgm(log.final_weight_map, outdir / WEIGHT_MAP_PGM),
        write_weight_distance_csv(log, outdir / WEIGHT_DISTANCE_CSV),
    ]
    if log.final_weights is not None:
        written.append(_write(outdir / WEIGHTS_JSON, log.final_weights.save))
    written.append(write_summary(log, outdir / SUMMARY_JSON))
    return written


def load_trial_csv(path: Path) -> Dict[str, np.ndarray]:
    """Column arrays of an emitted trial.csv."""
    try:
        with open(path, newline="") as handle:
            rows = list(csv.DictReader(handle))
    except OSError as exc:
        raise ArtifactError(path, f"read failed: {exc}") from exc
    return {column: np.array([float(row[column]) for row in rows]) for column in TRIAL_COLUMNS}
