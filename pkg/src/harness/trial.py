"""Single-trial runner and the reflex baseline used to judge success."""

from __future__ import annotations

import functools
import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from src.config.presets import PresetConfig, TrialConfig
from src.config.settings import get_settings
from src.dynamics.filterbank import FilterBank
from src.errors import LostLineError, NumericAbortError
from src.harness import metrics
from src.learning.learner import Learner
from src.learning.snapshot import WeightSnapshot
from src.plant.world import StepRecord, World, run_step

logger = logging.getLogger(__name__)

STATUS_OK = "ok"
STATUS_LOST_LINE = "lost_line"
STATUS_NUMERIC_ABORT = "numeric_abort"


@dataclass
class TrialLog:
    config: TrialConfig
    preset: PresetConfig
    steps: list[StepRecord]
    weight_distances: np.ndarray
    final_weight_map: np.ndarray
    status: str = STATUS_OK
    error: Optional[str] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    reflex_baseline: Optional[float] = None
    elapsed_seconds: float = 0.0
    final_weights: Optional[WeightSnapshot] = None

    @property
    def e_c(self) -> np.ndarray:
        return np.array([step.e_c for step in self.steps])

    @property
    def n_steps_completed(self) -> int:
        return len(self.steps)

    @property
    def rms_error(self) -> Optional[float]:
        return metrics.rms(self.e_c) if self.steps else None

    @property
    def mean_abs_error(self) -> Optional[float]:
        return metrics.mean_abs(self.e_c) if self.steps else None

    @property
    def success_step(self) -> Optional[int]:
        """None for reflex-only trials, aborted trials and trials without a baseline."""
        if self.config.reflex_only or self.status != STATUS_OK or not self.steps:
            return None
        if self.reflex_baseline is None or self.reflex_baseline <= 0:
            return None
        return metrics.success_step(self.e_c, self.reflex_baseline)

    def normalized_weight_distances(self) -> np.ndarray:
        """Per-layer distance series divided by that layer's maximum (0 where it never moved)."""
        peak = self.weight_distances.max(axis=0) if self.weight_distances.size else np.zeros(0)
        scale = np.where(peak > 0, peak, 1.0)
        return self.weight_distances / scale


class TrialRunner:
    """Build the world, filter bank and learner for one TrialConfig and run it to completion."""

    def __init__(self, config: TrialConfig) -> None:
        self.settings = get_settings()
        self.config = config
        preset = config.resolve()
        if self.settings.off_track_limit is not None and "off_track_limit" not in config.overrides:
            preset = preset.model_copy(update={"off_track_limit": self.settings.off_track_limit})
        self.preset = preset

        self.stats: Dict[str, Any] = {
            "steps": 0,
            "off_track_steps": 0,
            "start_time": None,
            "end_time": None,
        }

    def build(self) -> tuple[World, Learner, FilterBank]:
        fb = self.preset.filter_bank
        bank = FilterBank.from_range(self.preset.sensors.n_predictors, fb.n_taps, fb.peak_min, fb.peak_max, fb.damping)
        learner = Learner.from_config(self.preset.network, bank.n_outputs, self.config.seed, self.config.effective_eta)
        world = World.from_preset(self.preset)
        return world, learner, bank

    def run(self, reflex_baseline: Optional[float] = None) -> TrialLog:
        world, learner, bank = self.build()
        n_layers = learner.network.n_layers
        distances = np.zeros((self.config.n_steps, n_layers))
        status, error, diagnostics = STATUS_OK, None, {}

        self.stats["start_time"] = time.perf_counter()
        logger.info("Starting trial %s (%d steps)", self.config.label, self.config.n_steps)
        try:
            for k in range(self.config.n_steps):
                run_step(world, learner, bank, self.preset)
                distances[k] = learner.weight_distance()
                self.stats["steps"] += 1
                if not world.history[-1].on_track:
                    self.stats["off_track_steps"] += 1
        except LostLineError as exc:
            status, error = STATUS_LOST_LINE, str(exc)
            diagnostics = {"step": exc.step, "off_track_steps": exc.off_track_steps}
            logger.error("✗ %s: %s", self.config.label, exc)
        except NumericAbortError as exc:
            status, error, diagnostics = STATUS_NUMERIC_ABORT, str(exc), dict(exc.diagnostics)
            logger.error("✗ %s: %s %s", self.config.label, exc, exc.diagnostics)
        self.stats["end_time"] = time.perf_counter()
        logger.info(
            "Trial %s stats: %d/%d steps run, %d off-track steps",
            self.config.label,
            self.stats["steps"],
            self.config.n_steps,
            self.stats["off_track_steps"],
        )

        log = TrialLog(
            config=self.config,
            preset=self.preset,
            steps=list(world.history),
            weight_distances=distances[: len(world.history)],
            final_weight_map=learner.network.first_layer_map(),
            status=status,
            error=error,
            diagnostics=diagnostics,
            reflex_baseline=reflex_baseline,
            elapsed_seconds=self.stats["end_time"] - self.stats["start_time"],
            final_weights=WeightSnapshot.from_network(learner.network),
        )
        if status == STATUS_OK:
            logger.info(
                "✓ %s: rms %.5f, mean|e| %.5f, success %s (%.2fs)",
                self.config.label,
                log.rms_error,
                log.mean_abs_error,
                log.success_step,
                log.elapsed_seconds,
            )
        return log


@functools.lru_cache(maxsize=32)
def _reflex_baseline_cached(reflex_json: str, off_track_limit: Optional[int]) -> float:
    """``off_track_limit`` is the environment override in force; it only keys the cache."""
    config = TrialConfig.model_validate_json(reflex_json)
    log = TrialRunner(config).run()
    if log.status != STATUS_OK or not log.steps:
        raise LostLineError(log.diagnostics.get("step", 0), log.diagnostics.get("off_track_steps", 0))
    return float(log.mean_abs_error)


def reflex_baseline(config: TrialConfig) -> float:
    """Mean |E_c| of the reflex-only trial on the same preset, overrides and length.

    Reflex trials carry no randomness, so every seed yields the same series and one trial stands
    for the mean over repetitions.
    """
    reflex = config.reflex_counterpart().model_copy(update={"seed": 0})
    return _reflex_baseline_cached(reflex.model_dump_json(), get_settings().off_track_limit)


def run_trial(config: TrialConfig, baseline: Optional[float] = None, compute_baseline: bool = True) -> TrialLog:
    """Run one trial; learning trials get the reflex baseline computed (and cached) when not given.

    A reflex trial that loses the line leaves the learning trial without a baseline, so its
    success step stays absent; the learning trial itself still runs.
    """
    if baseline is None and compute_baseline and not config.reflex_only:
        try:
            baseline = reflex_baseline(config)
        except LostLineError as exc:
            logger.warning("no reflex baseline for %s: %s", config.label, exc)
    log = TrialRunner(config).run(reflex_baseline=baseline)
    if config.reflex_only and log.reflex_baseline is None and log.status == STATUS_OK:
        log.reflex_baseline = log.mean_abs_error
    return log


def run(config: TrialConfig) -> TrialLog:
    return run_trial(config)
