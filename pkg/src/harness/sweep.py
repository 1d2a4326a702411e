"""Learning-rate and seed sweeps over independent trials."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

from pydantic import BaseModel

from src.config.presets import SweepGrid, TrialConfig
from src.config.settings import get_settings
from src.errors import ArtifactError, ConfigError, IDLError, LostLineError
from src.harness import metrics
from src.harness.artifacts import emit
from src.harness.trial import STATUS_OK, reflex_baseline, run_trial

logger = logging.getLogger(__name__)

REFLEX = "reflex"


class CellResult(BaseModel):
    eta: float
    seed: int
    reflex_only: bool
    status: str
    error: Optional[str] = None
    rms: Optional[float] = None
    mean_abs_error: Optional[float] = None
    success_step: Optional[int] = None
    n_steps_completed: int = 0

    @property
    def key(self) -> tuple:
        return (0 if self.reflex_only else 1, self.eta, self.seed)

    @property
    def group(self) -> str:
        return REFLEX if self.reflex_only else f"{self.eta:g}"


class GroupSummary(BaseModel):
    group: str
    eta: float
    reflex_only: bool
    n_cells: int
    n_ok: int
    rms_median: Optional[float] = None
    rms_q1: Optional[float] = None
    rms_q3: Optional[float] = None
    success_median: Optional[float] = None
    success_q1: Optional[float] = None
    success_q3: Optional[float] = None
    n_success: int = 0


class SweepSummary(BaseModel):
    preset: str
    n_steps: int
    reflex_baseline: Optional[float] = None
    cells: List[CellResult]
    groups: List[GroupSummary]

    def group(self, name: str) -> GroupSummary:
        for group in self.groups:
            if group.group == name:
                return group
        raise KeyError(name)

    def learning_groups(self) -> List[GroupSummary]:
        return sorted((g for g in self.groups if not g.reflex_only), key=lambda g: g.eta)


def run_cell(config_json: str, baseline: Optional[float], outdir: Optional[str] = None) -> Dict[str, Any]:
    """Run one sweep cell; picklable entry point for worker processes.

    ``baseline`` is the sweep-wide reflex baseline; ``None`` means it is unavailable and the cell
    runs without one.
    """
    config = TrialConfig.model_validate_json(config_json)
    try:
        log = run_trial(config, baseline=baseline, compute_baseline=False)
    except IDLError as exc:
        return CellResult(
            eta=config.eta, seed=config.seed, reflex_only=config.reflex_only, status="config_error", error=str(exc)
        ).model_dump()
    if outdir is not None and log.steps:
        emit(log, Path(outdir))
    return CellResult(
        eta=config.eta,
        seed=config.seed,
        reflex_only=config.reflex_only,
        status=log.status,
        error=log.error,
        rms=log.rms_error,
        mean_abs_error=log.mean_abs_error,
        success_step=log.success_step,
        n_steps_completed=log.n_steps_completed,
    ).model_dump()


def _cell_dir(root: Optional[Path], config: TrialConfig) -> Optional[str]:
    if root is None:
        return None
    name = f"{REFLEX}_seed{config.seed}" if config.reflex_only else f"eta{config.eta:g}_seed{config.seed}"
    return str(root / name)


def summarize(cells: Sequence[CellResult], n_steps: int) -> List[GroupSummary]:
    """Median/IQR per group; absent success steps are censored at ``n_steps + 1``."""
    groups: Dict[str, List[CellResult]] = {}
    for cell in cells:
        groups.setdefault(cell.group, []).append(cell)

    summaries = []
    for name, members in groups.items():
        ok = [c for c in members if c.status == STATUS_OK]
        rms_spread = metrics.median_iqr([c.rms for c in ok])
        summary = GroupSummary(
            group=name,
            eta=members[0].eta,
            reflex_only=members[0].reflex_only,
            n_cells=len(members),
            n_ok=len(ok),
            n_success=sum(1 for c in ok if c.success_step is not None),
        )
        if rms_spread is not None:
            summary.rms_median, summary.rms_q1, summary.rms_q3 = rms_spread.median, rms_spread.q1, rms_spread.q3
        if not members[0].reflex_only:
            censored = [c.success_step if c.success_step is not None else n_steps + 1 for c in members]
            success_spread = metrics.median_iqr(censored)
            if success_spread is not None:
                summary.success_median = success_spread.median
                summary.success_q1 = success_spread.q1
                summary.success_q3 = success_spread.q3
        summaries.append(summary)
    return sorted(summaries, key=lambda g: (0 if g.reflex_only else 1, g.eta))


def run_configs(
    configs: Iterable[TrialConfig],
    outdir: Optional[Path] = None,
    workers: Optional[int] = None,
) -> SweepSummary:
    """Run every config, merge results by (η, seed) and summarize per learning rate."""
    configs = list(configs)
    if not configs:
        raise ConfigError("sweep needs at least one trial")
    keys = [(c.reflex_only, c.eta, c.seed) for c in configs]
    if len(set(keys)) != len(keys):
        raise ConfigError("sweep contains duplicate (eta, seed) cells")
    presets = {c.preset for c in configs}
    lengths = {c.n_steps for c in configs}
    variants = {json.dumps(c.overrides, sort_keys=True) for c in configs}
    if len(presets) != 1 or len(lengths) != 1 or len(variants) != 1:
        raise ConfigError("all sweep cells must share preset, n_steps and overrides")
    configs[0].resolve()

    workers = get_settings().sweep_workers if workers is None else workers
    baseline: Optional[float] = None
    try:
        baseline = reflex_baseline(configs[0])
    except LostLineError as exc:
        logger.error("reflex baseline trial lost the line: %s", exc)
    logger.info(
        "Sweep: %d cells on %s, reflex baseline %s, %s",
        len(configs),
        next(iter(presets)),
        f"{baseline:.5f}" if baseline is not None else "n/a",
        f"{workers} workers" if workers else "sequential",
    )

    results: List[CellResult] = []
    jobs = [(c.model_dump_json(), baseline, _cell_dir(outdir, c)) for c in configs]
    if workers:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(run_cell, *job) for job in jobs]
            for future in as_completed(futures):
                cell = CellResult.model_validate(future.result())
                logger.info("cell %s/seed%d: %s", cell.group, cell.seed, cell.status)
                results.append(cell)
    else:
        for job in jobs:
            cell = CellResult.model_validate(run_cell(*job))
            logger.info("cell %s/seed%d: %s", cell.group, cell.seed, cell.status)
            results.append(cell)

    results.sort(key=lambda c: c.key)
    n_steps = next(iter(lengths))
    summary = SweepSummary(
        preset=next(iter(presets)),
        n_steps=n_steps,
        reflex_baseline=baseline,
        cells=results,
        groups=summarize(results, n_steps),
    )
    if outdir is not None:
        write_sweep_summary(summary, Path(outdir) / "sweep_summary.json")
    return summary


def sweep_eta(configs: Iterable[TrialConfig], outdir: Optional[Path] = None, workers: Optional[int] = None) -> SweepSummary:
    return run_configs(configs, outdir=outdir, workers=workers)


def sweep_seed(configs: Iterable[TrialConfig], outdir: Optional[Path] = None, workers: Optional[int] = None) -> SweepSummary:
    """Seed sweep at fixed learning rate(s); grouped the same way so per-seed cells stay visible."""
    return run_configs(configs, outdir=outdir, workers=workers)


def run_grid(grid: SweepGrid, outdir: Optional[Path] = None, workers: Optional[int] = None) -> SweepSummary:
    return run_configs(grid.cells(), outdir=outdir, workers=workers)


def write_sweep_summary(summary: SweepSummary, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(summary.model_dump(mode="json"), indent=2))
    except OSError as exc:
        raise ArtifactError(path, f"write failed: {exc}") from exc
    logger.info("wrote %s", path)
    return path
