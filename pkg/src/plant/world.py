"""One line-follower world and the per-step control/learning cycle."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from src.config.presets import PresetConfig
from src.dynamics.filterbank import FilterBank
from src.errors import LostLineError, NumericAbortError
from src.learning.learner import Learner
from src.plant.robot import RobotState, step_robot, steering
from src.plant.sensors import SensorArray, read_error, read_predictors
from src.plant.track import Track, build_track

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StepRecord:
    k: int
    e_c: float
    a_p: float
    v_left: float
    v_right: float
    x: float
    y: float
    heading: float
    on_track: bool

    def __post_init__(self) -> None:
        values = (self.e_c, self.a_p, self.v_left, self.v_right, self.x, self.y, self.heading)
        if not all(math.isfinite(value) for value in values):
            raise ValueError(f"non-finite step record at k={self.k}: {self}")


@dataclass
class World:
    """Track, robot and sensors of a single trial; one writer, advanced by ``run_step``."""

    track: Track
    robot: RobotState
    sensors: SensorArray
    k: int = 0
    last_error: float = 0.0
    off_track_steps: int = 0
    history: list[StepRecord] = field(default_factory=list)

    @classmethod
    def from_preset(cls, preset: PresetConfig) -> "World":
        track = build_track(preset.track)
        start = track.nearest_index(preset.track.start)
        x, y = (float(v) for v in track.polyline[start])
        robot = RobotState(
            x=x,
            y=y,
            heading=track.tangent_heading(start),
            v_left=preset.steering.v0,
            v_right=preset.steering.v0,
            wheelbase=preset.robot.wheelbase,
        )
        world = cls(track=track, robot=robot, sensors=SensorArray(preset.sensors))
        world.last_error, _ = read_error(robot, track, world.sensors)
        return world


def run_step(world: World, learner: Learner, bank: FilterBank, config: PresetConfig) -> StepRecord:
    """Sense, filter, act, move, then train on the error measured after the move.

    Raises LostLineError once both ground sensors have been dark for more than
    ``config.off_track_limit`` consecutive steps.
    """
    predictors = read_predictors(world.robot, world.track, world.sensors)
    u = bank.step(predictors)
    a_p = learner.act(u)
    if not math.isfinite(a_p):
        raise NumericAbortError(f"non-finite predictive action at step {world.k}", {"step": world.k, "a_p": a_p})

    v_left, v_right = steering(world.last_error, a_p, config.steering)
    world.robot = step_robot(world.robot.with_speeds(v_left, v_right), config.dt)

    e_c, on_track = read_error(world.robot, world.track, world.sensors)
    learner.learn(e_c)

    world.off_track_steps = 0 if on_track else world.off_track_steps + 1
    record = StepRecord(
        k=world.k,
        e_c=e_c,
        a_p=a_p,
        v_left=v_left,
        v_right=v_right,
        x=world.robot.x,
        y=world.robot.y,
        heading=world.robot.heading,
        on_track=on_track,
    )
    world.history.append(record)
    world.last_error = e_c
    world.k += 1
    logger.debug("k=%d e_c=%.5f a_p=%.5f on_track=%s", record.k, e_c, a_p, on_track)

    if world.off_track_steps > config.off_track_limit:
        logger.warning("lost line at step %d (%d steps off track)", record.k, world.off_track_steps)
        raise LostLineError(record.k, world.off_track_steps)
    return record
