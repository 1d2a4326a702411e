"""Differential-drive kinematics and the steering law."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Tuple

from src.config.presets import SteeringConfig


@dataclass(frozen=True)
class RobotState:
    x: float
    y: float
    heading: float
    v_left: float = 0.0
    v_right: float = 0.0
    wheelbase: float = 36.0

    def __post_init__(self) -> None:
        if not self.wheelbase > 0:
            raise ValueError(f"wheelbase must be positive, got {self.wheelbase}")

    @property
    def pose(self) -> Tuple[float, float, float]:
        return (self.x, self.y, self.heading)

    def with_speeds(self, v_left: float, v_right: float) -> "RobotState":
        return replace(self, v_left=v_left, v_right=v_right)


def steering(e_c: float, a_p: float, config: SteeringConfig) -> Tuple[float, float]:
    """(v_left, v_right) with V_R = V_0 + αE_c + βA_P and V_L = V_0 - αE_c - βA_P."""
    turn = config.alpha * e_c + config.beta * a_p
    return config.v0 - turn, config.v0 + turn


def step_robot(robot: RobotState, dt: float) -> RobotState:
    """One explicit-Euler step of the unicycle model driven by the two wheel speeds."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    v = 0.5 * (robot.v_left + robot.v_right)
    omega = (robot.v_right - robot.v_left) / robot.wheelbase
    return replace(
        robot,
        x=robot.x + v * math.cos(robot.heading) * dt,
        y=robot.y + v * math.sin(robot.heading) * dt,
        heading=robot.heading + omega * dt,
    )
