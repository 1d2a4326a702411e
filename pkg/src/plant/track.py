"""Closed line track: waypoints joined by a centripetal Catmull-Rom spline."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from src.config.presets import TrackConfig
from src.errors import ConfigError

logger = logging.getLogger(__name__)

MIN_WAYPOINTS = 4
CENTRIPETAL = 0.5
NEAREST_SAMPLES = 8


def rounded_rectangle_waypoints(
    width: float = 48.0,
    height: float = 48.0,
    radii: Sequence[float] = (10.0, 22.0, 10.0, 22.0),
    straight_spacing: float = 5.0,
) -> np.ndarray:
    """Counterclockwise outline starting at the bottom-right corner.

    ``radii`` are the bottom-right, top-right, top-left and bottom-left corner radii. Each corner
    contributes four points 30° apart; straights get interior points on a ``straight_spacing`` grid.
    """
    r_br, r_tr, r_tl, r_bl = radii
    corners = [
        ((width - r_br, r_br), r_br, -90.0),
        ((width - r_tr, height - r_tr), r_tr, 0.0),
        ((r_tl, height - r_tl), r_tl, 90.0),
        ((r_bl, r_bl), r_bl, 180.0),
    ]
    points: list[tuple[float, float]] = []
    for index, (center, radius, start) in enumerate(corners):
        arc = [
            (center[0] + radius * math.cos(math.radians(start + 30.0 * k)),
             center[1] + radius * math.sin(math.radians(start + 30.0 * k)))
            for k in range(4)
        ]
        points.extend(arc)
        next_center, next_radius, next_start = corners[(index + 1) % len(corners)]
        begin = np.array(arc[-1])
        end = np.array(
            (next_center[0] + next_radius * math.cos(math.radians(next_start)),
             next_center[1] + next_radius * math.sin(math.radians(next_start)))
        )
        axis = int(np.argmax(np.abs(end - begin)))
        lo, hi = sorted((begin[axis], end[axis]))
        grid = np.arange(math.floor(lo / straight_spacing) + 1, math.ceil(hi / straight_spacing)) * straight_spacing
        grid = grid[(grid > lo) & (grid < hi)]
        if end[axis] < begin[axis]:
            grid = grid[::-1]
        for value in grid:
            point = begin.copy()
            point[axis] = value
            points.append((float(point[0]), float(point[1])))
    return np.array(points)


def catmull_rom_closed(waypoints: np.ndarray, spacing: float) -> np.ndarray:
    """Dense closed polyline through ``waypoints`` (centripetal Catmull-Rom, Barry-Goldman form)."""
    n = len(waypoints)
    samples = []
    for i in range(n):
        p0, p1, p2, p3 = (waypoints[(i + offset) % n] for offset in (-1, 0, 1, 2))
        t0 = 0.0
        t1 = t0 + np.linalg.norm(p1 - p0) ** CENTRIPETAL
        t2 = t1 + np.linalg.norm(p2 - p1) ** CENTRIPETAL
        t3 = t2 + np.linalg.norm(p3 - p2) ** CENTRIPETAL
        count = max(2, int(math.ceil(np.linalg.norm(p2 - p1) / spacing)))
        t = np.linspace(t1, t2, count, endpoint=False)[:, None]

        a1 = (t1 - t) / (t1 - t0) * p0 + (t - t0) / (t1 - t0) * p1
        a2 = (t2 - t) / (t2 - t1) * p1 + (t - t1) / (t2 - t1) * p2
        a3 = (t3 - t) / (t3 - t2) * p2 + (t - t2) / (t3 - t2) * p3
        b1 = (t2 - t) / (t2 - t0) * a1 + (t - t0) / (t2 - t0) * a2
        b2 = (t3 - t) / (t3 - t1) * a2 + (t - t1) / (t3 - t1) * a3
        samples.append((t2 - t) / (t2 - t1) * b1 + (t - t1) / (t2 - t1) * b2)
    return np.vstack(samples)


@dataclass
class Track:
    """Closed track; the line is everything within ``half_width`` of the spline centerline."""

    waypoints: np.ndarray
    half_width: float = 6.0
    closed: bool = True
    sample_spacing: float = 0.25
    polyline: np.ndarray = field(init=False, repr=False)
    arc_length: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.waypoints = np.asarray(self.waypoints, dtype=float)
        if self.waypoints.ndim != 2 or self.waypoints.shape[1] != 2:
            raise ConfigError(f"waypoints must be a list of 2D points, got shape {self.waypoints.shape}")
        if len(self.waypoints) < MIN_WAYPOINTS:
            raise ConfigError(f"track needs at least {MIN_WAYPOINTS} waypoints, got {len(self.waypoints)}")
        if not self.closed:
            raise ConfigError("only closed tracks are supported")
        if not self.half_width > 0:
            raise ConfigError(f"half_width must be positive, got {self.half_width}")
        gaps = np.linalg.norm(np.roll(self.waypoints, -1, axis=0) - self.waypoints, axis=1)
        if np.any(gaps == 0.0):
            raise ConfigError("consecutive waypoints must be distinct")

        self.polyline = catmull_rom_closed(self.waypoints, self.sample_spacing)
        segments = np.linalg.norm(np.roll(self.polyline, -1, axis=0) - self.polyline, axis=1)
        self.arc_length = np.concatenate([[0.0], np.cumsum(segments)[:-1]])
        self._length = float(segments.sum())
        self._seg_start = self.polyline
        self._seg_vec = np.roll(self.polyline, -1, axis=0) - self.polyline
        self._seg_len2 = np.maximum(np.einsum("ij,ij->i", self._seg_vec, self._seg_vec), np.finfo(float).tiny)
        self._reach = 0.5 * float(np.sqrt(self._seg_len2.max()))
        self._tree = cKDTree(self.polyline)
        self.validate()
        logger.debug("track: %d waypoints, %d samples, length %.2f", len(self.waypoints), len(self.polyline), self._length)

    @property
    def length(self) -> float:
        return self._length

    def validate(self) -> None:
        """Reject tracks that come within 2·half_width of themselves away from the local stretch."""
        stride = max(1, int(round(self.half_width / 2.0 / self.sample_spacing)))
        points = self.polyline[::stride]
        along = self.arc_length[::stride]
        distance = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=2)
        separation = np.abs(along[:, None] - along[None, :])
        separation = np.minimum(separation, self._length - separation)
        clash = (separation > 4.0 * self.half_width) & (distance < 2.0 * self.half_width)
        if np.any(clash):
            i, j = np.argwhere(clash)[0]
            raise ConfigError(
                f"track self-approaches: points {points[i].round(3).tolist()} and {points[j].round(3).tolist()} "
                f"are {distance[i, j]:.3f} apart"
            )

    def distance(self, points: np.ndarray) -> np.ndarray:
        """Perpendicular distance from each point (shape (m, 2) or (2,)) to the centerline."""
        q = np.atleast_2d(np.asarray(points, dtype=float))
        n = len(self.polyline)
        k = min(NEAREST_SAMPLES, n)
        sample_dist, sample_idx = self._tree.query(q, k=k)
        sample_dist = np.reshape(sample_dist, (len(q), k))
        sample_idx = np.reshape(sample_idx, (len(q), k))
        # the closest segment starts or ends at a sample within nearest + half the longest segment
        segments = np.concatenate([sample_idx, (sample_idx - 1) % n], axis=1)
        result = self._segment_distance(q, segments)
        unsure = sample_dist[:, -1] <= sample_dist[:, 0] + self._reach
        if np.any(unsure):
            everything = np.broadcast_to(np.arange(n), (int(unsure.sum()), n))
            result[unsure] = self._segment_distance(q[unsure], everything)
        return result

    def _segment_distance(self, q: np.ndarray, segments: np.ndarray) -> np.ndarray:
        """Distance from q[i] to the nearest of the segments listed in row i of ``segments``."""
        start = self._seg_start[segments]
        vec = self._seg_vec[segments]
        rel = q[:, None, :] - start
        t = np.clip(np.einsum("mck,mck->mc", rel, vec) / self._seg_len2[segments], 0.0, 1.0)
        closest = start + t[..., None] * vec
        return np.linalg.norm(q[:, None, :] - closest, axis=2).min(axis=1)

    def nearest_index(self, point: Sequence[float]) -> int:
        return int(self._tree.query(np.asarray(point, dtype=float))[1])

    def tangent_heading(self, index: int) -> float:
        """Heading of the centerline at polyline sample ``index`` in travel direction."""
        n = len(self.polyline)
        delta = self.polyline[(index + 1) % n] - self.polyline[(index - 1) % n]
        return float(math.atan2(delta[1], delta[0]))

    @classmethod
    def default(cls, half_width: float = 6.0, sample_spacing: float = 0.25) -> "Track":
        return cls(rounded_rectangle_waypoints(), half_width=half_width, sample_spacing=sample_spacing)

    @classmethod
    def from_json(cls, path: Path, sample_spacing: Optional[float] = None) -> "Track":
        """Load ``{"waypoints": [[x, y], ...], "half_width": w, "closed": true}``."""
        try:
            payload = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"could not load track {path}: {exc}") from exc
        if "waypoints" not in payload:
            raise ConfigError(f"track {path} has no waypoints")
        return cls(
            np.asarray(payload["waypoints"], dtype=float),
            half_width=float(payload.get("half_width", 6.0)),
            closed=bool(payload.get("closed", True)),
            sample_spacing=sample_spacing or float(payload.get("sample_spacing", 0.25)),
        )


def build_track(config: TrackConfig) -> Track:
    if config.path is not None:
        return Track.from_json(Path(config.path), sample_spacing=config.sample_spacing)
    if config.waypoints is not None:
        return Track(np.asarray(config.waypoints, dtype=float), config.half_width, sample_spacing=config.sample_spacing)
    return Track.default(half_width=config.half_width, sample_spacing=config.sample_spacing)
