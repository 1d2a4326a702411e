import math

import numpy as np
import pytest

from src.config.presets import SteeringConfig
from src.plant.robot import RobotState, step_robot, steering


@pytest.mark.parametrize(
    "e_c, a_p, config, expected",
    [
        (0.0, 0.0, SteeringConfig(), (40.0, 40.0)),
        (0.1, 0.0, SteeringConfig(), (20.0, 60.0)),
        (0.0, 0.1, SteeringConfig(), (30.0, 50.0)),
        (0.1, 0.0, SteeringConfig(alpha=0.0), (40.0, 40.0)),
        (-0.1, 0.0, SteeringConfig(), (60.0, 20.0)),
    ],
)
def test_steering(e_c: float, a_p: float, config: SteeringConfig, expected: tuple[float, float]) -> None:
    assert steering(e_c, a_p, config) == pytest.approx(expected)


def test_equal_speeds_drive_straight() -> None:
    robot = RobotState(0.0, 0.0, 0.0, 40.0, 40.0)
    for _ in range(100):
        robot = step_robot(robot, 0.01)
    assert robot.pose == pytest.approx((40.0, 0.0, 0.0))


def test_opposite_speeds_rotate_in_place() -> None:
    robot = RobotState(1.0, 2.0, 0.0, -10.0, 10.0)
    for _ in range(50):
        robot = step_robot(robot, 0.01)
    assert (robot.x, robot.y) == pytest.approx((1.0, 2.0))
    assert robot.heading == pytest.approx(50 * 0.01 * 20.0 / 36.0)


def test_constant_differential_traces_circle() -> None:
    v_left, v_right, wheelbase, dt = 30.0, 50.0, 36.0, 0.01
    radius = 0.5 * (v_left + v_right) / ((v_right - v_left) / wheelbase)
    steps = int(round(2 * math.pi / ((v_right - v_left) / wheelbase * dt)))
    robot = RobotState(0.0, 0.0, 0.0, v_left, v_right, wheelbase)
    points = []
    for _ in range(steps):
        robot = step_robot(robot, dt)
        points.append((robot.x, robot.y))
    points = np.asarray(points)
    center = points.mean(axis=0)
    radii = np.linalg.norm(points - center, axis=1)
    assert np.all(np.abs(radii - radius) <= 0.01 * radius)


def test_step_displacement_is_bounded_by_wheel_speed() -> None:
    rng = np.random.default_rng(0)
    robot = RobotState(0.0, 0.0, 0.3)
    for v_left, v_right in rng.uniform(-80.0, 80.0, size=(200, 2)):
        robot = robot.with_speeds(v_left, v_right)
        moved = step_robot(robot, 0.01)
        assert math.hypot(moved.x - robot.x, moved.y - robot.y) <= max(abs(v_left), abs(v_right)) * 0.01 + 1e-12
        robot = moved


@pytest.mark.parametrize("dt", [0.0, -0.01])
def test_non_positive_dt_is_rejected(dt: float) -> None:
    with pytest.raises(ValueError):
        step_robot(RobotState(0.0, 0.0, 0.0), dt)


def test_wheelbase_must_be_positive() -> None:
    with pytest.raises(ValueError):
        RobotState(0.0, 0.0, 0.0, wheelbase=0.0)
