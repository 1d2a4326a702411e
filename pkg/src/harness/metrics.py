"""Scalar reductions over closed-loop error series."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

SUCCESS_WINDOW = 100
SUCCESS_REDUCTION = 0.25


def _series(values: Sequence[float]) -> np.ndarray:
    series = np.asarray(values, dtype=float)
    if series.ndim != 1 or series.size == 0:
        raise ValueError("series must be a nonempty 1D sequence")
    return series


def rms(values: Sequence[float]) -> float:
    series = _series(values)
    return float(np.sqrt(np.mean(series * series)))


def mean_abs(values: Sequence[float]) -> float:
    return float(np.mean(np.abs(_series(values))))


def success_step(
    values: Sequence[float],
    reflex_baseline_mean: float,
    window: int = SUCCESS_WINDOW,
    reduction: float = SUCCESS_REDUCTION,
) -> Optional[int]:
    """Step count at which the trailing ``window`` mean of |e_c| first drops to ``reduction`` × baseline.

    Steps are counted from 1, so a series that is zero from the start succeeds at ``window``.
    Returns None when the threshold is never met or the series is shorter than one window.
    """
    if not reflex_baseline_mean > 0:
        raise ValueError(f"reflex baseline must be positive, got {reflex_baseline_mean}")
    series = np.abs(_series(values))
    if series.size < window:
        return None
    trailing = sliding_window_view(series, window).mean(axis=1)
    hits = np.flatnonzero(trailing <= reduction * reflex_baseline_mean)
    if hits.size == 0:
        return None
    return int(hits[0]) + window


@dataclass(frozen=True)
class Spread:
    median: float
    q1: float
    q3: float
    n: int

    @property
    def iqr(self) -> float:
        return self.q3 - self.q1


def median_iqr(values: Sequence[float]) -> Optional[Spread]:
    """Median and quartiles (linear interpolation); None for an empty sample."""
    sample = np.asarray([v for v in values if v is not None], dtype=float)
    if sample.size == 0:
        return None
    q1, median, q3 = np.percentile(sample, [25.0, 50.0, 75.0])
    return Spread(median=float(median), q1=float(q1), q3=float(q3), n=int(sample.size))
