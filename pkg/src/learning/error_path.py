"""Error path from the closed-loop error E_c to the learner's signal t_r."""

from __future__ import annotations

import math
from typing import Optional

from src.dynamics.transfer_function import TransferFunction
from src.errors import SignalError
from src.learning.network import LearningSignal


class ErrorPath:
    """t_r[k] = error_gain_sign · (T_R E_c)[k].

    With the default unity T_R the literal reflex-loop minus sign is folded into
    ``error_gain_sign = +1``; when T_R is the composed -Q_R/(1 + H_R Q_R), use -1 so the
    update still descends the closed-loop cost.
    """

    def __init__(self, transfer: Optional[TransferFunction] = None, error_gain_sign: float = 1.0) -> None:
        if error_gain_sign not in (-1.0, 1.0):
            raise ValueError(f"error_gain_sign must be +1 or -1, got {error_gain_sign}")
        self.transfer = transfer if transfer is not None else TransferFunction.gain(1.0)
        self.error_gain_sign = float(error_gain_sign)

    def signal(self, e_c: float) -> LearningSignal:
        if not math.isfinite(e_c):
            raise SignalError(f"closed-loop error is not finite: {e_c}")
        return LearningSignal(e_c=e_c, t_r_output=self.error_gain_sign * self.transfer.step(e_c))

    def reset(self) -> None:
        self.transfer.reset()
