"""Time-stepped reflex loop for linear plants.

Block diagram (one sample per step):

    E_c = S_d - S_a
    A_R = H_R E_c
    S_a = Q_R (D z^-T + A_R + A_P)

``S_d`` enters only the comparator.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from src.dynamics.transfer_function import TransferFunction
from src.errors import ShapeError, WellPosednessError

logger = logging.getLogger(__name__)


@dataclass
class LinearLoopConfig:
    """Reflex loop with a linear environment Q_R and reflex controller H_R."""

    q_r: TransferFunction
    h_r: TransferFunction
    delay_T: int
    s_d: np.ndarray
    d: np.ndarray

    def __post_init__(self) -> None:
        if self.delay_T < 0:
            raise ShapeError(f"delay_T must be non-negative, got {self.delay_T}")
        self.s_d = np.asarray(self.s_d, dtype=float)
        self.d = np.asarray(self.d, dtype=float)
        if self.s_d.shape != self.d.shape or self.s_d.ndim != 1:
            raise ShapeError(f"s_d and d must be 1-D sequences of equal length ({self.s_d.shape} vs {self.d.shape})")

    @property
    def n_steps(self) -> int:
        return int(self.s_d.size)


@dataclass
class LoopTrace:
    e_c: np.ndarray
    s_a: np.ndarray
    a_r: np.ndarray
    extras: dict = field(default_factory=dict)


def _aligned_actions(cfg: LinearLoopConfig, a_p: Sequence[float]) -> np.ndarray:
    actions = np.asarray(a_p, dtype=float)
    if actions.shape != (cfg.n_steps,):
        raise ShapeError(f"a_p has shape {actions.shape}, expected ({cfg.n_steps},)")
    return actions


def check_well_posed(q_r: TransferFunction, h_r: TransferFunction) -> float:
    """Return the per-step algebraic-loop divisor 1 + b_q b_h.

    Static-gain loops are solved exactly; a loop without delay that contains any dynamic block is rejected.
    """
    loop_gain = q_r.feedthrough * h_r.feedthrough
    if loop_gain != 0.0 and not (q_r.is_static and h_r.is_static):
        raise WellPosednessError(
            "Q_R H_R has no delay and at least one block is dynamic; insert a delay or use static gains"
        )
    divisor = 1.0 + loop_gain
    if divisor == 0.0:
        raise WellPosednessError("static loop gain H_R Q_R = -1 makes the loop singular")
    return divisor


def simulate_loop(cfg: LinearLoopConfig, a_p: Sequence[float]) -> LoopTrace:
    """Step the block diagram and return the full trace."""
    actions = _aligned_actions(cfg, a_p)
    q_r = cfg.q_r.fresh()
    h_r = cfg.h_r.fresh()
    delay = TransferFunction.delay(cfg.delay_T)
    divisor = check_well_posed(q_r, h_r)
    b_q = q_r.feedthrough

    e_c = np.zeros(cfg.n_steps)
    s_a = np.zeros(cfg.n_steps)
    a_r = np.zeros(cfg.n_steps)
    for k in range(cfg.n_steps):
        disturbance = delay.step(cfg.d[k])
        # S_a is affine in E_c through the feedthrough terms; solve for E_c before stepping the blocks.
        e_c[k] = (cfg.s_d[k] - b_q * (disturbance + actions[k] + h_r.pending) - q_r.pending) / divisor
        a_r[k] = h_r.step(e_c[k])
        s_a[k] = q_r.step(disturbance + a_r[k] + actions[k])
    return LoopTrace(e_c=e_c, s_a=s_a, a_r=a_r)


def closed_loop_error(cfg: LinearLoopConfig, a_p: Sequence[float]) -> np.ndarray:
    """E_c[k] obtained by time-stepping the loop (no symbolic division)."""
    return simulate_loop(cfg, a_p).e_c


def open_loop_error_terms(
    cfg: LinearLoopConfig,
    a_p: Sequence[float],
    a_p_desired: Sequence[float],
) -> tuple[np.ndarray, np.ndarray]:
    """Return (E_c, Q_R E_o) for the open-loop/closed-loop equivalence.

    The desired state is the loop response when the learner emits ``a_p_desired`` while the
    reflex contribution A_R is held at the value it takes in the actual loop.
    """
    actions = _aligned_actions(cfg, a_p)
    desired_actions = _aligned_actions(cfg, a_p_desired)
    actual = simulate_loop(cfg, actions)

    q_desired = cfg.q_r.fresh()
    delay = TransferFunction.delay(cfg.delay_T)
    desired_state = np.zeros(cfg.n_steps)
    for k in range(cfg.n_steps):
        disturbance = delay.step(cfg.d[k])
        desired_state[k] = q_desired.step(disturbance + actual.a_r[k] + desired_actions[k])

    e_c = desired_state - actual.s_a
    q_e_o = cfg.q_r.response(desired_actions - actions)
    return e_c, q_e_o


def open_loop_identity_check(
    cfg: LinearLoopConfig,
    a_p: Sequence[float],
    a_p_desired: Sequence[float],
) -> float:
    """max_k |E_c[k] - (Q_R E_o)[k]|."""
    e_c, q_e_o = open_loop_error_terms(cfg, a_p, a_p_desired)
    deviation = float(np.max(np.abs(e_c - q_e_o))) if e_c.size else 0.0
    logger.debug("open-loop identity deviation %.3e over %d steps", deviation, e_c.size)
    return deviation
