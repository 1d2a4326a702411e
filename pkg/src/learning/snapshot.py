"""JSON weight snapshots ({layer -> row-major matrix})."""

from __future__ import annotations

from pathlib import Path
from typing import Dict, List

import numpy as np
from pydantic import BaseModel, Field, field_validator

from src.errors import ArtifactError
from src.learning.network import LayeredNetwork


class WeightSnapshot(BaseModel):
    """Serializable copy of every layer's weights plus the output gains."""

    layers: Dict[str, List[List[float]]] = Field(default_factory=dict)
    output_gains: List[float] = Field(default_factory=list)
    activation: str = "linear"

    @field_validator("layers")
    @classmethod
    def _rectangular(cls, layers: Dict[str, List[List[float]]]) -> Dict[str, List[List[float]]]:
        for name, rows in layers.items():
            if rows and len({len(row) for row in rows}) != 1:
                raise ValueError(f"layer {name} is not rectangular")
        return layers

    @classmethod
    def from_network(cls, net: LayeredNetwork) -> "WeightSnapshot":
        return cls(
            layers={str(index): w.tolist() for index, w in enumerate(net.weights)},
            output_gains=net.output_gains.tolist(),
            activation=net.activation,
        )

    def to_network(self) -> LayeredNetwork:
        ordered = [np.asarray(self.layers[key], dtype=float) for key in sorted(self.layers, key=int)]
        return LayeredNetwork(ordered, output_gains=self.output_gains or None, activation=self.activation)  # type: ignore[arg-type]

    def save(self, path: Path) -> Path:
        try:
            path.write_text(self.model_dump_json(indent=2))
        except OSError as exc:
            raise ArtifactError(path, f"could not write weight snapshot: {exc}") from exc
        return path

    @classmethod
    def load(cls, path: Path) -> "WeightSnapshot":
        try:
            return cls.model_validate_json(path.read_text())
        except OSError as exc:
            raise ArtifactError(path, f"could not read weight snapshot: {exc}") from exc
