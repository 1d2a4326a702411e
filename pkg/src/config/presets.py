"""Trial, preset and sweep configuration models.

Presets describe the world, the filter bank and the learner; a ``TrialConfig`` picks a preset,
a learning rate and a seed and may override any preset field by nested key.
"""

from __future__ import annotations

import copy
import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.dynamics.transfer_function import TransferFunction
from src.errors import ConfigError


class TransferFunctionSpec(BaseModel):
    """Coefficients in ascending powers of z^-1."""

    num: List[float] = Field(default_factory=lambda: [1.0])
    den: List[float] = Field(default_factory=lambda: [1.0])

    def build(self) -> TransferFunction:
        return TransferFunction(self.num, self.den)


class FilterBankConfig(BaseModel):
    n_taps: int = Field(default=5, ge=1)
    peak_min: int = Field(default=3, ge=2, description="Impulse-response peak of the fastest tap (steps)")
    peak_max: int = Field(default=10, ge=2, description="Impulse-response peak of the slowest tap (steps)")
    damping: float = Field(default=0.51, gt=0.5, description="Quality factor Q of every tap")

    @model_validator(mode="after")
    def _ordered_range(self) -> "FilterBankConfig":
        if self.peak_max < self.peak_min:
            raise ValueError(f"peak_max ({self.peak_max}) < peak_min ({self.peak_min})")
        if self.n_taps > 1 and self.peak_max - self.peak_min + 1 < self.n_taps:
            raise ValueError(f"cannot place {self.n_taps} distinct taps in [{self.peak_min}, {self.peak_max}]")
        return self


class SteeringConfig(BaseModel):
    v0: float = Field(default=40.0, description="Base wheel speed")
    alpha: float = Field(default=200.0, description="Reflex gain on E_c")
    beta: float = Field(default=100.0, description="Gain on the learner's action A_P")


class NetworkConfig(BaseModel):
    hidden_layers: List[int] = Field(default_factory=lambda: [12, 6])
    n_outputs: int = Field(default=1, ge=1)
    output_gains: Optional[List[float]] = None
    activation: Literal["linear", "tanh"] = "linear"
    init_scheme: Literal["lecun", "fan_in"] = "lecun"
    init_gain: float = Field(default=1.0, gt=0)
    error_gain_sign: float = 1.0
    reflex_transfer: Optional[TransferFunctionSpec] = Field(
        default=None,
        description="T_R applied to E_c before it reaches the learner (unity when unset)",
    )

    @field_validator("hidden_layers")
    @classmethod
    def _positive_sizes(cls, sizes: List[int]) -> List[int]:
        if any(size < 1 for size in sizes):
            raise ValueError(f"hidden layer sizes must be positive, got {sizes}")
        return sizes

    @field_validator("error_gain_sign")
    @classmethod
    def _unit_sign(cls, value: float) -> float:
        if value not in (-1.0, 1.0):
            raise ValueError(f"error_gain_sign must be +1 or -1, got {value}")
        return value

    @model_validator(mode="after")
    def _gains_match_outputs(self) -> "NetworkConfig":
        if self.output_gains is not None and len(self.output_gains) != self.n_outputs:
            raise ValueError(f"{len(self.output_gains)} output gains for {self.n_outputs} outputs")
        return self

    @property
    def layer_sizes(self) -> List[int]:
        return [*self.hidden_layers, self.n_outputs]


class SensorRow(BaseModel):
    """One row of mirrored light sensors ``ahead`` of the axle.

    ``lateral`` lists the positive offsets outermost first; each offset is mirrored to the right
    side, so a row of 2n sensors yields n predictors.
    """

    ahead: float = Field(gt=0)
    lateral: List[float] = Field(min_length=1)

    @field_validator("lateral")
    @classmethod
    def _outermost_first(cls, offsets: List[float]) -> List[float]:
        if any(value <= 0 for value in offsets):
            raise ValueError("lateral offsets must be positive (mirrored to the right side)")
        if any(inner >= outer for outer, inner in zip(offsets, offsets[1:])):
            raise ValueError(f"lateral offsets must be strictly decreasing (outermost first), got {offsets}")
        return offsets


def _default_lateral() -> List[float]:
    return [1.5 + 3.0 * j for j in range(7, -1, -1)]


class SensorConfig(BaseModel):
    ground_ahead: float = Field(default=4.0, gt=0)
    ground_lateral: float = Field(default=3.0, gt=0, description="Offset of G_L / G_R from the heading axis")
    rows: List[SensorRow] = Field(default_factory=lambda: [SensorRow(ahead=10.0, lateral=_default_lateral())])

    @property
    def n_predictors(self) -> int:
        return sum(len(row.lateral) for row in self.rows)


class RobotConfig(BaseModel):
    wheelbase: float = Field(default=36.0, gt=0)


class TrackConfig(BaseModel):
    path: Optional[str] = Field(default=None, description="JSON track file; overrides waypoints")
    waypoints: Optional[List[Tuple[float, float]]] = None
    half_width: float = Field(default=6.0, gt=0)
    start: Tuple[float, float] = (30.0, 0.0)
    sample_spacing: float = Field(default=0.25, gt=0)


class PresetConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    dt: float = Field(default=0.01, gt=0)
    off_track_limit: int = Field(default=200, gt=0)
    filter_bank: FilterBankConfig = Field(default_factory=FilterBankConfig)
    steering: SteeringConfig = Field(default_factory=SteeringConfig)
    network: NetworkConfig = Field(default_factory=NetworkConfig)
    sensors: SensorConfig = Field(default_factory=SensorConfig)
    robot: RobotConfig = Field(default_factory=RobotConfig)
    track: TrackConfig = Field(default_factory=TrackConfig)

    @property
    def n_inputs(self) -> int:
        return self.sensors.n_predictors * self.filter_bank.n_taps


PRESETS: Dict[str, PresetConfig] = {
    # 16 sensors -> 8 predictors, 5 taps -> 40 inputs
    "sim16": PresetConfig(name="sim16"),
    # 6x16 grid -> 48 predictors, 5 taps -> 240 inputs, 11 hidden layers of 11, 3 outputs
    "cam6x16": PresetConfig(
        name="cam6x16",
        filter_bank=FilterBankConfig(n_taps=5, peak_min=5, peak_max=10),
        network=NetworkConfig(hidden_layers=[11] * 11, n_outputs=3, output_gains=[0.25, 0.5, 1.0]),
        sensors=SensorConfig(
            rows=[SensorRow(ahead=ahead, lateral=_default_lateral()) for ahead in (6.0, 8.0, 10.0, 12.0, 14.0, 16.0)]
        ),
    ),
}


def deep_merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Recursively overlay ``overrides`` on a copy of ``base``; nested dicts merge, other values replace."""
    merged = copy.deepcopy(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def get_preset(name: str) -> PresetConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r} (available: {', '.join(sorted(PRESETS))})") from None


class TrialConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    preset: str = "sim16"
    eta: float = Field(default=1e-2, ge=0)
    seed: int = 0
    n_steps: int = Field(default=1000, gt=0)
    reflex_only: bool = False
    overrides: Dict[str, Any] = Field(default_factory=dict)

    @property
    def effective_eta(self) -> float:
        return 0.0 if self.reflex_only else self.eta

    @property
    def label(self) -> str:
        return f"{self.preset}/reflex/seed{self.seed}" if self.reflex_only else f"{self.preset}/eta{self.eta:g}/seed{self.seed}"

    def resolve(self) -> PresetConfig:
        """Preset with overrides applied; reflex-only trials also zero the predictive gain β."""
        base = get_preset(self.preset).model_dump()
        merged = deep_merge(base, self.overrides)
        if self.reflex_only:
            merged = deep_merge(merged, {"steering": {"beta": 0.0}})
        try:
            return PresetConfig.model_validate(merged)
        except ValidationError as exc:
            raise ConfigError(f"invalid overrides for preset {self.preset!r}: {exc}") from exc

    def reflex_counterpart(self) -> "TrialConfig":
        return self.model_copy(update={"reflex_only": True, "eta": 0.0})


class SweepGrid(BaseModel):
    model_config = ConfigDict(extra="forbid")

    preset: str = "sim16"
    etas: List[float] = Field(min_length=1)
    seeds: List[int] = Field(min_length=1)
    n_steps: int = Field(default=1000, gt=0)
    include_reflex: bool = True
    overrides: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("etas")
    @classmethod
    def _non_negative(cls, etas: List[float]) -> List[float]:
        if any(eta < 0 for eta in etas):
            raise ValueError(f"learning rates must be non-negative, got {etas}")
        if len(set(etas)) != len(etas):
            raise ValueError(f"duplicate learning rates in {etas}")
        return etas

    @field_validator("seeds")
    @classmethod
    def _unique_seeds(cls, seeds: List[int]) -> List[int]:
        if len(set(seeds)) != len(seeds):
            raise ValueError(f"duplicate seeds in {seeds}")
        return seeds

    def cells(self) -> List[TrialConfig]:
        """Every (η, seed) trial, reflex cells first when requested."""
        base = {"preset": self.preset, "n_steps": self.n_steps, "overrides": self.overrides}
        configs = []
        if self.include_reflex:
            configs.extend(TrialConfig(**base, eta=0.0, seed=seed, reflex_only=True) for seed in self.seeds)
        configs.extend(TrialConfig(**base, eta=eta, seed=seed) for eta in self.etas for seed in self.seeds)
        return configs


def _load_model(model: type[BaseModel], path: Path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"could not read {path}: {exc}") from exc
    try:
        return model.model_validate(json.loads(text))
    except (ValidationError, json.JSONDecodeError) as exc:
        raise ConfigError(f"invalid {model.__name__} in {path}: {exc}") from exc


def load_trial_config(path: Path) -> TrialConfig:
    return _load_model(TrialConfig, path)


def load_sweep_grid(path: Path) -> SweepGrid:
    return _load_model(SweepGrid, path)
