"""End-to-end acceptance checks on the sim16 preset.

Runs one reflex + learning-rate sweep and a pair of identical reference trials, then evaluates
the ratio, ordering, success-time, seed, convergence, weight-map and determinism criteria.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from src.config.presets import SweepGrid, TrialConfig
from src.errors import ArtifactError
from src.harness.artifacts import TRIAL_CSV, emit
from src.harness.sweep import SweepSummary, run_grid
from src.harness.trial import STATUS_OK, TrialLog, TrialRunner, run_trial
from src.learning.learner import Learner

logger = logging.getLogger(__name__)

ETA_GRID = [1e-5, 1e-4, 1e-3, 1e-2, 1e-1]
REFERENCE_ETA = 1e-2
RMS_RATIO_LIMIT = 0.4
INVERSION_TOLERANCE = 0.05
SEED_RATIO_LIMIT = 3.0
SETTLED_FRACTION = 0.1
SETTLED_VARIATION = 0.05


class CriterionResult(BaseModel):
    id: int
    name: str
    passed: bool
    detail: Dict[str, Any] = Field(default_factory=dict)


class AcceptanceReport(BaseModel):
    preset: str
    n_steps: int
    seeds: List[int]
    criteria: List[CriterionResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)


def rms_ratio(summary: SweepSummary, eta: float = REFERENCE_ETA) -> Optional[float]:
    reflex = summary.group("reflex").rms_median
    learned = summary.group(f"{eta:g}").rms_median
    if reflex is None or learned is None or reflex == 0:
        return None
    return learned / reflex


def ordered_with_slack(values: Sequence[float], tolerance: float = INVERSION_TOLERANCE) -> bool:
    """Non-increasing, except at most one adjacent rise of no more than ``tolerance`` (relative)."""
    inversions = 0
    for previous, current in zip(values, values[1:]):
        if current <= previous:
            continue
        inversions += 1
        if inversions > 1 or current > previous * (1.0 + tolerance):
            return False
    return True


def success_decreasing(medians: Sequence[float], n_steps: int) -> bool:
    """Medians never rise with η, strictly fall where trials succeed, and the last beats the first."""
    if len(medians) < 2 or not medians[-1] < medians[0]:
        return False
    for previous, current in zip(medians, medians[1:]):
        if current > previous:
            return False
        if current <= n_steps and not current < previous:
            return False
    return True


def settled_variation(log: TrialLog, fraction: float = SETTLED_FRACTION) -> float:
    """Largest per-layer range of the normalized weight distance over the final ``fraction`` of steps."""
    normalized = log.normalized_weight_distances()
    tail = normalized[-max(1, int(round(fraction * len(normalized)))):]
    return float(np.max(tail.max(axis=0) - tail.min(axis=0))) if tail.size else 0.0


def outer_inner_weights(log: TrialLog) -> tuple[float, float]:
    """Mean |first-layer weight| over the taps of the outermost and the innermost predictor of the first row."""
    n_taps = log.preset.filter_bank.n_taps
    n_pairs = len(log.preset.sensors.rows[0].lateral)
    weights = log.final_weight_map
    outer = weights[0:n_taps]
    inner = weights[(n_pairs - 1) * n_taps : n_pairs * n_taps]
    return float(outer.mean()), float(inner.mean())


def zero_error_is_fixed_point(config: TrialConfig, seed: int = 0) -> bool:
    preset = config.resolve()
    n_inputs = preset.n_inputs
    learner = Learner.from_config(preset.network, n_inputs, seed=seed, eta=REFERENCE_ETA)
    before = [w.copy() for w in learner.network.weights]
    learner.act(np.random.default_rng(seed).normal(size=n_inputs))
    learner.learn(0.0)
    return all(np.array_equal(a, b) for a, b in zip(before, learner.network.weights))


def evaluate(
    outdir: Path,
    preset: str = "sim16",
    n_steps: int = 1000,
    seeds: Sequence[int] = tuple(range(10)),
    etas: Sequence[float] = tuple(ETA_GRID),
    workers: Optional[int] = None,
) -> AcceptanceReport:
    outdir = Path(outdir)
    report = AcceptanceReport(preset=preset, n_steps=n_steps, seeds=list(seeds))
    grid = SweepGrid(preset=preset, etas=list(etas), seeds=list(seeds), n_steps=n_steps, include_reflex=True)
    summary = run_grid(grid, outdir=outdir / "sweep", workers=workers)

    ratio = rms_ratio(summary)
    report.criteria.append(
        CriterionResult(
            id=1,
            name="learning_vs_reflex_rms",
            passed=ratio is not None and ratio <= RMS_RATIO_LIMIT,
            detail={"ratio": ratio, "limit": RMS_RATIO_LIMIT},
        )
    )

    reflex_median = summary.group("reflex").rms_median
    learning = summary.learning_groups()
    rms_medians = [g.rms_median for g in learning]
    complete = all(m is not None for m in rms_medians) and reflex_median is not None
    report.criteria.append(
        CriterionResult(
            id=2,
            name="eta_sweep_rms_ordering",
            passed=complete
            and ordered_with_slack(rms_medians)  # type: ignore[arg-type]
            and all(m < reflex_median for m in rms_medians),  # type: ignore[operator]
            detail={"etas": [g.eta for g in learning], "rms_medians": rms_medians, "reflex_median": reflex_median},
        )
    )

    success_medians = [g.success_median for g in learning]
    report.criteria.append(
        CriterionResult(
            id=3,
            name="success_step_decay",
            passed=all(m is not None for m in success_medians) and success_decreasing(success_medians, n_steps),  # type: ignore[arg-type]
            detail={"etas": [g.eta for g in learning], "success_medians": success_medians},
        )
    )

    seed_cells = [
        c for c in summary.cells if not c.reflex_only and c.eta == REFERENCE_ETA and c.seed in list(seeds)[:5]
    ]
    steps = [c.success_step for c in seed_cells]
    seed_ok = bool(steps) and all(s is not None for s in steps)
    seed_ratio = max(steps) / min(steps) if seed_ok else None  # type: ignore[type-var,operator]
    report.criteria.append(
        CriterionResult(
            id=4,
            name="seed_robustness",
            passed=seed_ratio is not None and seed_ratio <= SEED_RATIO_LIMIT,
            detail={"success_steps": steps, "ratio": seed_ratio, "limit": SEED_RATIO_LIMIT},
        )
    )

    reference = TrialConfig(preset=preset, eta=REFERENCE_ETA, seed=list(seeds)[0], n_steps=n_steps)
    first = run_trial(reference, baseline=summary.reflex_baseline)
    second = TrialRunner(reference).run(reflex_baseline=summary.reflex_baseline)
    first_dir, second_dir = outdir / "reference_a", outdir / "reference_b"
    if first.steps:
        emit(first, first_dir)
    if second.steps:
        emit(second, second_dir)

    fixed_point = zero_error_is_fixed_point(reference)
    variation = settled_variation(first) if first.status == STATUS_OK else None
    report.criteria.append(
        CriterionResult(
            id=8,
            name="fixed_point_and_settling",
            passed=fixed_point and variation is not None and variation < SETTLED_VARIATION,
            detail={"zero_error_fixed_point": fixed_point, "settled_variation": variation, "limit": SETTLED_VARIATION},
        )
    )

    outer, inner = outer_inner_weights(first)
    report.criteria.append(
        CriterionResult(
            id=9,
            name="outer_predictors_dominate",
            passed=first.status == STATUS_OK and outer > inner,
            detail={"outer_mean": outer, "inner_mean": inner},
        )
    )

    try:
        identical = (first_dir / TRIAL_CSV).read_bytes() == (second_dir / TRIAL_CSV).read_bytes()
    except OSError as exc:
        raise ArtifactError(first_dir / TRIAL_CSV, f"determinism check failed: {exc}") from exc
    report.criteria.append(CriterionResult(id=10, name="determinism", passed=identical, detail={}))

    for criterion in report.criteria:
        logger.info("%s criterion %d %s: %s", "✓" if criterion.passed else "✗", criterion.id, criterion.name, criterion.detail)
    write_report(report, outdir / "acceptance.json")
    return report


def write_report(report: AcceptanceReport, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(report.model_dump_json(indent=2))
    except OSError as exc:
        raise ArtifactError(path, f"write failed: {exc}") from exc
    return path
