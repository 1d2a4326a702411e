"""Learner wiring: network, error path and learning rate as one unit of the outer loop."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from src.config.presets import NetworkConfig
from src.learning.error_path import ErrorPath
from src.learning.network import LayeredNetwork, LearningSignal

logger = logging.getLogger(__name__)


@dataclass
class Learner:
    network: LayeredNetwork
    error_path: ErrorPath
    eta: float

    @classmethod
    def from_config(cls, config: NetworkConfig, n_inputs: int, seed: int, eta: float) -> "Learner":
        network = LayeredNetwork.build(
            n_inputs,
            config.layer_sizes,
            seed=seed,
            output_gains=config.output_gains,
            activation=config.activation,
            init_scheme=config.init_scheme,
            init_gain=config.init_gain,
        )
        logger.debug("learner: %d inputs, layers %s, eta %g, seed %d", n_inputs, config.layer_sizes, eta, seed)
        transfer = config.reflex_transfer.build() if config.reflex_transfer is not None else None
        return cls(network=network, error_path=ErrorPath(transfer, config.error_gain_sign), eta=eta)

    def act(self, u: Sequence[float]) -> float:
        return self.network.forward(u)

    def learn(self, e_c: float) -> LearningSignal:
        """Credit the last forward pass with the closed-loop error measured after it acted."""
        signal = self.error_path.signal(e_c)
        if self.eta == 0.0:
            return signal
        self.network.backward()
        self.network.compute_internal_errors(signal)
        self.network.update(self.eta)
        return signal

    def weight_distance(self) -> np.ndarray:
        return self.network.weight_distance()
