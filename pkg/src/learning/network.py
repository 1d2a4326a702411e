"""Layered learning unit with closed-loop error backpropagation.

Notation follows the learner's equations:

    Λ^ℓ_j = Σ_i ω^ℓ_ij Λ^{ℓ-1}_i              forward, Λ^{-1} = U
    G^ℓ_j = Σ_k ω^{ℓ+1}_jk G^{ℓ+1}_k            internal gradient, G^L_k = c_k
    Φ^ℓ_j = 2 G^ℓ_j · t_r                        internal error
    Δω^ℓ_ij = η Φ^ℓ_j Λ^{ℓ-1}_i                  update (lag-zero correlation)

The optional ``tanh`` activation squashes hidden layers in the forward pass only; backward
and update keep the linear expressions, so gradients are exact only for linear networks.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np

from src.errors import NumericAbortError, ShapeError, SignalError

logger = logging.getLogger(__name__)

Activation = Literal["linear", "tanh"]
InitScheme = Literal["lecun", "fan_in"]


@dataclass(frozen=True)
class LearningSignal:
    """Closed-loop error sample and its image through the configured error path."""

    e_c: float
    t_r_output: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.e_c) and np.isfinite(self.t_r_output)):
            raise SignalError(f"learning signal must be finite (e_c={self.e_c}, t_r_output={self.t_r_output})")


def init_weights(
    shapes: Sequence[tuple[int, int]],
    rng: np.random.Generator,
    scheme: InitScheme = "lecun",
    gain: float = 1.0,
) -> list[np.ndarray]:
    """Uniform random weights per layer.

    ``lecun``: U(-g·sqrt(3/fan_in), +g·sqrt(3/fan_in)), unit variance gain through each layer.
    ``fan_in``: U(-0.5, +0.5) / fan_in.
    """
    weights = []
    for fan_in, fan_out in shapes:
        if scheme == "lecun":
            bound = gain * np.sqrt(3.0 / fan_in)
            weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        elif scheme == "fan_in":
            weights.append(gain * rng.uniform(-0.5, 0.5, size=(fan_in, fan_out)) / fan_in)
        else:
            raise ValueError(f"unknown init scheme {scheme!r}")
    return weights


class LayeredNetwork:
    """Fully connected network N(P, ω) whose output A_P steers the robot."""

    def __init__(
        self,
        weights: Sequence[np.ndarray],
        output_gains: Optional[Sequence[float]] = None,
        activation: Activation = "linear",
    ) -> None:
        if not weights:
            raise ShapeError("network needs at least one layer")
        self.weights = [np.array(w, dtype=float, copy=True) for w in weights]
        for index, w in enumerate(self.weights):
            if w.ndim != 2:
                raise ShapeError(f"layer {index} weights must be a matrix, got shape {w.shape}")
        for index, (lower, upper) in enumerate(zip(self.weights, self.weights[1:])):
            if lower.shape[1] != upper.shape[0]:
                raise ShapeError(
                    f"layer {index} has {lower.shape[1]} neurons but layer {index + 1} expects {upper.shape[0]} inputs"
                )

        n_outputs = self.weights[-1].shape[1]
        gains = np.ones(n_outputs) if output_gains is None else np.asarray(output_gains, dtype=float)
        if gains.shape != (n_outputs,):
            raise ShapeError(f"output_gains has shape {gains.shape}, expected ({n_outputs},)")
        self.output_gains = gains
        self.activation = activation

        self.init_snapshot = [w.copy() for w in self.weights]
        self.inputs = np.zeros(self.n_inputs)
        self.net_inputs = [np.zeros(w.shape[1]) for w in self.weights]
        self.activations = [np.zeros(w.shape[1]) for w in self.weights]
        self.internal_gradients = [np.zeros(w.shape[1]) for w in self.weights]
        self.internal_errors = [np.zeros(w.shape[1]) for w in self.weights]

    @classmethod
    def build(
        cls,
        n_inputs: int,
        layer_sizes: Sequence[int],
        seed: int,
        output_gains: Optional[Sequence[float]] = None,
        activation: Activation = "linear",
        init_scheme: InitScheme = "lecun",
        init_gain: float = 1.0,
    ) -> "LayeredNetwork":
        """Seeded random network with ``layer_sizes`` neurons per layer (last entry = outputs)."""
        fans = [n_inputs, *layer_sizes]
        shapes = list(zip(fans[:-1], fans[1:]))
        rng = np.random.default_rng(seed)
        weights = init_weights(shapes, rng, scheme=init_scheme, gain=init_gain)
        logger.debug("built network %s with seed %d (%s init)", fans, seed, init_scheme)
        return cls(weights, output_gains=output_gains, activation=activation)

    # ------------------------------------------------------------------ shape
    @property
    def n_inputs(self) -> int:
        return self.weights[0].shape[0]

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    @property
    def layer_sizes(self) -> list[int]:
        return [w.shape[1] for w in self.weights]

    def _is_hidden(self, layer: int) -> bool:
        return layer < self.n_layers - 1

    # ------------------------------------------------------------------ passes
    def forward(self, u: Sequence[float]) -> float:
        """Propagate U through every layer and return A_P = Σ_k c_k Λ^L_k."""
        x = np.asarray(u, dtype=float)
        if x.shape != (self.n_inputs,):
            raise ShapeError(f"expected {self.n_inputs} inputs, got shape {x.shape}")
        self.inputs = x.copy()
        signal = x
        for layer, w in enumerate(self.weights):
            net = signal @ w
            self.net_inputs[layer] = net
            signal = np.tanh(net) if (self.activation == "tanh" and self._is_hidden(layer)) else net
            self.activations[layer] = signal
        return float(self.output_gains @ signal)

    def backward(self) -> list[np.ndarray]:
        """Internal gradients G^ℓ_j = ∂A_P/∂Λ^ℓ_j, seeded with the output gains."""
        gradients: list[np.ndarray] = [np.zeros(0)] * self.n_layers
        gradients[-1] = self.output_gains.copy()
        for layer in range(self.n_layers - 2, -1, -1):
            upper = layer + 1
            gradients[layer] = self.weights[upper] @ gradients[upper]
        self.internal_gradients = gradients
        return gradients

    def compute_internal_errors(self, signal: LearningSignal) -> list[np.ndarray]:
        """Φ^ℓ_j = 2 G^ℓ_j t_r (the factor 2 comes from ∂|E_c|²/∂E_c)."""
        self.internal_errors = [2.0 * g * signal.t_r_output for g in self.internal_gradients]
        return self.internal_errors

    def update(self, eta: float) -> list[np.ndarray]:
        """Apply Δω^ℓ_ij = η Φ^ℓ_j Λ^{ℓ-1}_i and return the deltas.

        Raises NumericAbortError (weights untouched) if any delta or new weight is non-finite.
        """
        deltas = []
        for layer, w in enumerate(self.weights):
            presynaptic = self.inputs if layer == 0 else self.activations[layer - 1]
            deltas.append(eta * np.outer(presynaptic, self.internal_errors[layer]))

        updated = [w + delta for w, delta in zip(self.weights, deltas)]
        for layer, (delta, w) in enumerate(zip(deltas, updated)):
            if not (np.all(np.isfinite(delta)) and np.all(np.isfinite(w))):
                diagnostics = {
                    "layer": layer,
                    "eta": eta,
                    "max_abs_weight": float(np.nanmax(np.abs(self.weights[layer]))),
                    "max_abs_internal_error": float(np.nanmax(np.abs(self.internal_errors[layer]))),
                    "non_finite_deltas": int(np.count_nonzero(~np.isfinite(delta))),
                }
                logger.error("non-finite weight update in layer %d: %s", layer, diagnostics)
                raise NumericAbortError(f"non-finite weight update in layer {layer}", diagnostics)
        self.weights = updated
        return deltas

    # ------------------------------------------------------------------ observables
    def weight_distance(self) -> np.ndarray:
        """d_ℓ = ||ω^ℓ - ω^ℓ_init||_2 (Frobenius) per layer."""
        return np.array([np.linalg.norm(w - w0) for w, w0 in zip(self.weights, self.init_snapshot)])

    def first_layer_map(self) -> np.ndarray:
        """|ω^0| scaled by its maximum; rows follow the input order (predictor-major, tap-minor)."""
        magnitude = np.abs(self.weights[0])
        peak = float(magnitude.max()) if magnitude.size else 0.0
        if peak == 0.0:
            return np.zeros_like(magnitude)
        return magnitude / peak


def internal_errors(net: LayeredNetwork, sig: LearningSignal) -> list[np.ndarray]:
    return net.compute_internal_errors(sig)
