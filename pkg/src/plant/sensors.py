"""Point light sensors over the track: reflex pair (G_L, G_R) and the predictive array."""

from __future__ import annotations

from typing import Tuple

import numpy as np

from src.config.presets import SensorConfig
from src.plant.robot import RobotState
from src.plant.track import Track


def smoothstep(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, 1.0)
    return x * x * (3.0 - 2.0 * x)


def line_intensity(track: Track, point: np.ndarray) -> np.ndarray:
    """Reflected intensity at ``point`` (one or many): 1 on the centerline, 0 from half_width outward."""
    d = track.distance(point)
    return 1.0 - smoothstep(np.minimum(d / track.half_width, 1.0))


def body_to_world(x: float, y: float, heading: float, ahead: np.ndarray, lateral: np.ndarray) -> np.ndarray:
    """Map body offsets (ahead, lateral; lateral positive to the left) to world coordinates."""
    c, s = np.cos(heading), np.sin(heading)
    ahead = np.asarray(ahead, dtype=float)
    lateral = np.asarray(lateral, dtype=float)
    return np.column_stack((x + ahead * c - lateral * s, y + ahead * s + lateral * c))


class SensorArray:
    """Fixed sensor geometry for one robot; offsets are cached in body coordinates."""

    def __init__(self, config: SensorConfig) -> None:
        self.config = config
        self._ground_ahead = np.array([config.ground_ahead, config.ground_ahead])
        self._ground_lateral = np.array([config.ground_lateral, -config.ground_lateral])

        ahead, lateral = [], []
        for row in config.rows:
            offsets = np.asarray(row.lateral, dtype=float)
            ahead.extend([row.ahead] * (2 * offsets.size))
            # left sensor j followed by its mirror j*
            lateral.extend(np.column_stack((offsets, -offsets)).ravel())
        self._predictor_ahead = np.asarray(ahead)
        self._predictor_lateral = np.asarray(lateral)

    @property
    def n_predictors(self) -> int:
        return self._predictor_ahead.size // 2

    def ground_points(self, x: float, y: float, heading: float) -> np.ndarray:
        return body_to_world(x, y, heading, self._ground_ahead, self._ground_lateral)

    def predictor_points(self, x: float, y: float, heading: float) -> np.ndarray:
        return body_to_world(x, y, heading, self._predictor_ahead, self._predictor_lateral)

    def read_error(self, track: Track, x: float, y: float, heading: float) -> Tuple[float, bool]:
        """E_c = G_L - G_R and whether either ground sensor still sees the line."""
        g_left, g_right = line_intensity(track, self.ground_points(x, y, heading))
        return float(g_left - g_right), bool(g_left > 0.0 or g_right > 0.0)

    def read_predictors(self, track: Track, x: float, y: float, heading: float) -> np.ndarray:
        """P_j = I_j - I_j* per mirrored pair, outermost first within each row."""
        intensity = line_intensity(track, self.predictor_points(x, y, heading))
        return intensity[0::2] - intensity[1::2]


def read_error(robot: RobotState, track: Track, sensors: SensorArray) -> Tuple[float, bool]:
    return sensors.read_error(track, robot.x, robot.y, robot.heading)


def read_predictors(robot: RobotState, track: Track, sensors: SensorArray) -> np.ndarray:
    return sensors.read_predictors(track, robot.x, robot.y, robot.heading)
