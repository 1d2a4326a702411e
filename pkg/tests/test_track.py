import json
from pathlib import Path

import numpy as np
import pytest

from src.config.presets import TrackConfig
from src.errors import ConfigError
from src.plant.track import Track, build_track, rounded_rectangle_waypoints

TRACK_FILE = Path(__file__).resolve().parent.parent / "tracks" / "default.json"


def test_default_track_is_valid_and_closed() -> None:
    track = Track.default()
    assert track.length > 0
    closing_gap = np.linalg.norm(track.polyline[0] - track.polyline[-1])
    assert closing_gap < 1.0


def test_shipped_track_matches_generator() -> None:
    payload = json.loads(TRACK_FILE.read_text())
    assert np.max(np.abs(np.asarray(payload["waypoints"]) - rounded_rectangle_waypoints())) <= 1e-9
    assert payload["half_width"] == 6.0


def test_from_json_builds_same_track_as_default() -> None:
    loaded = Track.from_json(TRACK_FILE)
    assert np.allclose(loaded.polyline, Track.default().polyline, atol=1e-9)


def test_spline_passes_through_waypoints() -> None:
    track = Track.default()
    distances = track.distance(track.waypoints)
    assert distances.shape == (len(track.waypoints),)
    assert np.all(distances < 1e-9)


def test_distance_to_straight_section() -> None:
    track = Track.default()
    # bottom straight runs along y = 0 between x = 22 and x = 38
    assert track.distance(np.array([30.0, 2.5])) == pytest.approx([2.5])
    assert track.distance(np.array([[30.0, -4.0], [30.0, 0.0]])) == pytest.approx([4.0, 0.0], abs=1e-12)


def test_travel_direction_is_counterclockwise() -> None:
    track = Track.default()
    index = track.nearest_index((30.0, 0.0))
    assert track.tangent_heading(index) == pytest.approx(0.0, abs=1e-9)


def test_too_few_waypoints_are_rejected() -> None:
    with pytest.raises(ConfigError):
        Track(np.array([[0.0, 0.0], [10.0, 0.0], [10.0, 10.0]]))


def test_repeated_waypoint_is_rejected() -> None:
    with pytest.raises(ConfigError):
        Track(np.array([[0.0, 0.0], [0.0, 0.0], [50.0, 0.0], [50.0, 50.0], [0.0, 50.0]]))


def test_self_approaching_track_is_rejected() -> None:
    # a long thin hairpin whose two legs run 4 units apart
    waypoints = np.array([[0.0, 0.0], [60.0, 0.0], [120.0, 0.0], [122.0, 2.0], [120.0, 4.0], [60.0, 4.0], [0.0, 4.0], [-2.0, 2.0]])
    with pytest.raises(ConfigError, match="self-approaches"):
        Track(waypoints)


def test_missing_track_file_is_a_config_error(tmp_path) -> None:
    with pytest.raises(ConfigError):
        Track.from_json(tmp_path / "none.json")
    empty = tmp_path / "empty.json"
    empty.write_text("{}")
    with pytest.raises(ConfigError):
        Track.from_json(empty)


def test_build_track_from_waypoints() -> None:
    waypoints = rounded_rectangle_waypoints(200.0, 200.0, radii=(40.0, 40.0, 40.0, 40.0), straight_spacing=20.0)
    track = build_track(TrackConfig(waypoints=[tuple(p) for p in waypoints], half_width=5.0))
    assert track.half_width == 5.0
    assert track.length > 600.0


def brute_force_distance(track: Track, points: np.ndarray) -> np.ndarray:
    start = track.polyline
    vec = np.roll(track.polyline, -1, axis=0) - start
    best = []
    for q in points:
        t = np.clip(((q - start) * vec).sum(axis=1) / (vec * vec).sum(axis=1), 0.0, 1.0)
        best.append(np.min(np.linalg.norm(q - (start + t[:, None] * vec), axis=1)))
    return np.array(best)


@pytest.mark.parametrize("spread", [1.0, 8.0, 60.0])
def test_distance_matches_projection_onto_every_segment(spread: float) -> None:
    track = Track.default()
    rng = np.random.default_rng(int(spread))
    anchors = track.polyline[rng.integers(0, len(track.polyline), size=200)]
    points = np.vstack([anchors + rng.normal(scale=spread, size=anchors.shape), [[24.0, 24.0]]])
    assert track.distance(points) == pytest.approx(brute_force_distance(track, points), abs=1e-12)


def test_nearest_index_is_closest_sample() -> None:
    track = Track.default()
    point = np.array([13.0, 41.0])
    expected = int(np.argmin(np.linalg.norm(track.polyline - point, axis=1)))
    assert track.nearest_index(point) == expected
