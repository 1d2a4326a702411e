"""Bank of second-order low-pass filters spreading each predictor over time.

Each tap is a continuous second-order low-pass with quality factor Q mapped to discrete time
by impulse invariance (unit sample time) and normalized to unity DC gain.  The natural
frequency is chosen so the impulse response peaks exactly at ``peak_step``:

    h[k] ∝ r^k sin(ω_d k),   peak where ω_d k = atan2(sqrt(1 - ζ²), ζ),   ζ = 1 / (2Q)
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from src.dynamics.transfer_function import TransferFunction
from src.errors import FilterParameterError, ShapeError, SignalError

logger = logging.getLogger(__name__)

MIN_PEAK_STEP = 2


@dataclass
class LowpassFilter:
    """Unity-DC-gain biquad whose impulse response peaks at ``peak_step``."""

    peak_step: int
    damping: float
    transfer: TransferFunction

    @property
    def num(self) -> np.ndarray:
        return self.transfer.num

    @property
    def den(self) -> np.ndarray:
        return self.transfer.den

    @property
    def state(self) -> np.ndarray:
        return self.transfer.state

    def step(self, x: float) -> float:
        return self.transfer.step(x)

    def reset(self) -> None:
        self.transfer.reset()

    def impulse_response(self, n: int) -> np.ndarray:
        return self.transfer.impulse_response(n)


def lowpass_new(peak_step: int, damping: float = 0.51) -> LowpassFilter:
    """Design the tap filter for ``peak_step`` (>= 2) and quality factor ``damping`` (> 0.5)."""
    if isinstance(peak_step, bool) or int(peak_step) != peak_step or peak_step < MIN_PEAK_STEP:
        raise FilterParameterError(f"peak_step must be an integer >= {MIN_PEAK_STEP}, got {peak_step!r}")
    if not damping > 0.5:
        raise FilterParameterError(f"damping (Q) must exceed 0.5 for an oscillatory pole pair, got {damping!r}")

    zeta = 1.0 / (2.0 * damping)
    root = math.sqrt(1.0 - zeta * zeta)
    omega_d = math.atan2(root, zeta) / peak_step
    omega_n = omega_d / root
    radius = math.exp(-zeta * omega_n)

    a1 = -2.0 * radius * math.cos(omega_d)
    a2 = radius * radius
    b1 = 1.0 + a1 + a2
    transfer = TransferFunction([0.0, b1], [1.0, a1, a2])
    return LowpassFilter(peak_step=int(peak_step), damping=float(damping), transfer=transfer)


def tap_peak_steps(peak_min: int, peak_max: int, n_taps: int) -> list[int]:
    """round(linspace(lo, hi, n)) with duplicates pushed upward to keep strict ordering."""
    if n_taps < 1:
        raise FilterParameterError(f"n_taps must be positive, got {n_taps}")
    if peak_min < MIN_PEAK_STEP or peak_max < peak_min:
        raise FilterParameterError(f"invalid peak range [{peak_min}, {peak_max}]")
    raw = np.floor(np.linspace(peak_min, peak_max, n_taps) + 0.5).astype(int)
    steps: list[int] = []
    for value in raw:
        if steps and value <= steps[-1]:
            value = steps[-1] + 1
        steps.append(int(value))
    return steps


class FilterBank:
    """Independent filter per (predictor, tap); output index = predictor * n_taps + tap.

    ``taps`` hold the shared coefficients only; all filter state lives in ``states``.
    """

    def __init__(self, n_predictors: int, peak_steps: Sequence[int], damping: float = 0.51) -> None:
        if n_predictors < 1:
            raise ShapeError(f"n_predictors must be positive, got {n_predictors}")
        if any(b <= a for a, b in zip(peak_steps, peak_steps[1:])):
            raise FilterParameterError(f"peak steps must be strictly increasing, got {list(peak_steps)}")
        self.n_predictors = n_predictors
        self.peak_steps = list(peak_steps)
        self.damping = damping
        self.taps = [lowpass_new(peak, damping) for peak in self.peak_steps]

        # Vectorized DF2T; row i filters predictor i // n_taps with tap i % n_taps.
        self._b = np.tile([tap.transfer.normalized[0] for tap in self.taps], (n_predictors, 1))
        self._a = np.tile([tap.transfer.normalized[1] for tap in self.taps], (n_predictors, 1))
        self._state = np.zeros((self.n_outputs, 2))
        logger.debug(
            "filter bank: %d predictors x %d taps, peaks %s, Q=%.3f",
            n_predictors,
            self.n_taps,
            self.peak_steps,
            damping,
        )

    @classmethod
    def from_range(
        cls,
        n_predictors: int,
        n_taps: int,
        peak_min: int,
        peak_max: int,
        damping: float = 0.51,
    ) -> "FilterBank":
        return cls(n_predictors, tap_peak_steps(peak_min, peak_max, n_taps), damping)

    @property
    def n_taps(self) -> int:
        return len(self.peak_steps)

    @property
    def n_outputs(self) -> int:
        return self.n_predictors * self.n_taps

    @property
    def states(self) -> np.ndarray:
        return self._state.copy()

    def step(self, p: Sequence[float]) -> np.ndarray:
        """Filter one predictor vector and return U (length n_predictors * n_taps)."""
        predictors = np.asarray(p, dtype=float)
        if predictors.shape != (self.n_predictors,):
            raise ShapeError(f"expected {self.n_predictors} predictors, got shape {predictors.shape}")
        if not np.all(np.isfinite(predictors)):
            raise SignalError(f"non-finite predictor values: {predictors.tolist()}")
        x = np.repeat(predictors, self.n_taps)
        y = self._b[:, 0] * x + self._state[:, 0]
        next_state = np.empty_like(self._state)
        next_state[:, 0] = self._state[:, 1] + self._b[:, 1] * x - self._a[:, 1] * y
        next_state[:, 1] = self._b[:, 2] * x - self._a[:, 2] * y
        self._state = next_state
        return y

    def reset(self) -> None:
        self._state = np.zeros_like(self._state)

    def impulse_responses(self, n: int) -> np.ndarray:
        """Impulse response of each tap of one predictor, shape (n_taps, n)."""
        return np.array([tap.impulse_response(n) for tap in self.taps])


def bank_step(bank: FilterBank, p: Sequence[float]) -> np.ndarray:
    return bank.step(p)


def bank_reset(bank: FilterBank) -> None:
    bank.reset()
