"""Discrete-time rational transfer functions in ascending powers of z^-1."""

from __future__ import annotations

from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import signal

from src.errors import CompositionError

# Poles closer than this to |z| = 1 count as lying on the unit circle.
UNIT_CIRCLE_TOL = 1e-9


class TransferFunction:
    """Stateful direct-form II transposed realization of B(z^-1) / A(z^-1).

    ``num`` holds b_0..b_m and ``den`` holds a_0..a_n, both in ascending powers of z^-1.
    Instances are single-writer: ``step`` advances the internal delay line.
    """

    def __init__(self, num: Sequence[float] | float, den: Sequence[float] | float = (1.0,)) -> None:
        num_arr = np.atleast_1d(np.asarray(num, dtype=float))
        den_arr = np.atleast_1d(np.asarray(den, dtype=float))
        if num_arr.size == 0:
            num_arr = np.zeros(1)
        if den_arr.size == 0 or den_arr[0] == 0.0:
            raise CompositionError(f"transfer function is not realizable: a_0 must be non-zero (den={den_arr.tolist()})")
        if not (np.all(np.isfinite(num_arr)) and np.all(np.isfinite(den_arr))):
            raise CompositionError("transfer function coefficients must be finite")

        self.num = num_arr
        self.den = den_arr

        order = max(num_arr.size, den_arr.size) - 1
        a0 = den_arr[0]
        self._b = np.zeros(order + 1)
        self._a = np.zeros(order + 1)
        self._b[: num_arr.size] = num_arr / a0
        self._a[: den_arr.size] = den_arr / a0
        self._state = np.zeros(order)

    # ------------------------------------------------------------------ constructors
    @classmethod
    def gain(cls, k: float) -> "TransferFunction":
        return cls([k], [1.0])

    @classmethod
    def delay(cls, steps: int) -> "TransferFunction":
        """Pure delay z^-T realized as num = [0, ..., 0, 1]."""
        if steps < 0:
            raise CompositionError(f"delay must be non-negative, got {steps}")
        return cls([0.0] * steps + [1.0], [1.0])

    def fresh(self) -> "TransferFunction":
        """Same coefficients, zero state."""
        return TransferFunction(self.num, self.den)

    # ------------------------------------------------------------------ properties
    @property
    def order(self) -> int:
        return self._state.size

    @property
    def state(self) -> np.ndarray:
        return self._state.copy()

    @property
    def normalized(self) -> tuple[np.ndarray, np.ndarray]:
        """(b, a) divided by a_0 and padded to order + 1."""
        return self._b.copy(), self._a.copy()

    @property
    def is_static(self) -> bool:
        """True when the block is a pure gain (no memory)."""
        return self.order == 0

    @property
    def feedthrough(self) -> float:
        """Direct-feedthrough coefficient b_0 / a_0."""
        return float(self._b[0])

    @property
    def pending(self) -> float:
        """Contribution of the stored state to the next output."""
        return float(self._state[0]) if self.order else 0.0

    # ------------------------------------------------------------------ realization
    def step(self, x: float) -> float:
        """Advance one sample: a_0 y[k] = sum b_i x[k-i] - sum_{i>=1} a_i y[k-i]."""
        y = self._b[0] * x + self.pending
        if self.order:
            shifted = np.empty_like(self._state)
            shifted[:-1] = self._state[1:]
            shifted[-1] = 0.0
            self._state = shifted + self._b[1:] * x - self._a[1:] * y
        return float(y)

    def reset(self) -> None:
        self._state = np.zeros(self.order)

    def response(self, x: Sequence[float]) -> np.ndarray:
        """Filter a whole sequence from zero state; this instance is untouched."""
        return signal.lfilter(self.num, self.den, np.asarray(x, dtype=float))

    def impulse_response(self, n: int) -> np.ndarray:
        impulse = np.zeros(n)
        if n:
            impulse[0] = 1.0
        return self.response(impulse)

    # ------------------------------------------------------------------ analysis
    def poles(self) -> np.ndarray:
        # a_0 z^n + a_1 z^(n-1) + ... + a_n, i.e. the ascending z^-1 list read as descending z.
        return np.roots(self.den)

    def zeros(self) -> np.ndarray:
        return np.roots(self.num) if np.any(self.num) else np.array([])

    def spectral_radius(self) -> float:
        poles = self.poles()
        return float(np.max(np.abs(poles))) if poles.size else 0.0

    def is_stable(self) -> bool:
        return self.spectral_radius() < 1.0

    def dc_gain(self) -> float:
        den_sum = float(np.sum(self.den))
        if den_sum == 0.0:
            return float("inf")
        return float(np.sum(self.num)) / den_sum

    # ------------------------------------------------------------------ algebra
    def series(self, other: "TransferFunction") -> "TransferFunction":
        return TransferFunction(P.polymul(self.num, other.num), P.polymul(self.den, other.den))

    def scaled(self, k: float) -> "TransferFunction":
        return TransferFunction(self.num * k, self.den)

    def __neg__(self) -> "TransferFunction":
        return self.scaled(-1.0)

    def __repr__(self) -> str:
        return f"TransferFunction(num={self.num.tolist()}, den={self.den.tolist()})"


def tf_step(tf: TransferFunction, x: float) -> float:
    """Advance ``tf`` by one sample and return its output."""
    return tf.step(x)


def reflex_transfer(q_r: TransferFunction, h_r: TransferFunction) -> TransferFunction:
    """Compose T_R = -Q_R / (1 + H_R Q_R) by polynomial arithmetic.

    With Q_R = qn/qd and H_R = hn/hd:  T_R = -qn·hd / (qd·hd + qn·hn).
    No pole-zero cancellation is attempted.
    """
    num = -P.polymul(q_r.num, h_r.den)
    den = P.polyadd(P.polymul(q_r.den, h_r.den), P.polymul(q_r.num, h_r.num))

    if not np.any(den):
        raise CompositionError("1 + H_R Q_R is identically zero")
    if den[0] == 0.0:
        raise CompositionError(
            "1 + H_R Q_R has no constant term; the reflex loop has an unrealizable advance"
        )
    poles = np.roots(den)
    if poles.size and np.any(np.abs(np.abs(poles) - 1.0) < UNIT_CIRCLE_TOL):
        raise CompositionError("1 + H_R Q_R has a zero on the unit circle")
    return TransferFunction(num, den)
