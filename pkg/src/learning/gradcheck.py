"""Finite-difference verification of the learner's gradients."""

from __future__ import annotations

import copy
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from src.learning.error_path import ErrorPath
from src.learning.network import LayeredNetwork

logger = logging.getLogger(__name__)

GRADIENT_TOL = 1e-6
UPDATE_TOL = 1e-5
PROPAGATION_TOL = 1e-12


@dataclass
class CheckResult:
    name: str
    error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.error) and self.error <= self.tolerance)


@dataclass
class GradcheckReport:
    seed: int
    layer_sizes: list[int]
    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)


def _relative_error(estimate: np.ndarray, reference: np.ndarray) -> float:
    scale = max(float(np.linalg.norm(reference)), float(np.finfo(float).tiny))
    return float(np.linalg.norm(estimate - reference)) / scale


def output_from_layer(net: LayeredNetwork, layer: int, values: np.ndarray) -> float:
    """A_P obtained by replacing Λ^layer with ``values`` and propagating upward (linear layers)."""
    signal = np.asarray(values, dtype=float)
    for upper in range(layer + 1, net.n_layers):
        signal = signal @ net.weights[upper]
    return float(net.output_gains @ signal)


def internal_gradient_error(net: LayeredNetwork, u: np.ndarray, h: float = 1e-6) -> float:
    """Worst relative error of G^ℓ against central differences of A_P in Λ^ℓ."""
    net.forward(u)
    gradients = net.backward()
    worst = 0.0
    for layer in range(net.n_layers):
        base = net.activations[layer].copy()
        numeric = np.zeros_like(base)
        for j in range(base.size):
            bumped = base.copy()
            bumped[j] += h
            upper = output_from_layer(net, layer, bumped)
            bumped[j] -= 2.0 * h
            lower = output_from_layer(net, layer, bumped)
            numeric[j] = (upper - lower) / (2.0 * h)
        worst = max(worst, _relative_error(gradients[layer], numeric))
    return worst


def _unity_plant_cost(net: LayeredNetwork, u: np.ndarray, target: float) -> float:
    error = target - net.forward(u)
    return error * error


def update_direction_error(net: LayeredNetwork, u: np.ndarray, target: float, h: float = 1e-5) -> float:
    """Relative error between Δω/η and -∂C_c/∂ω for C_c = (a_d - A_P)² with unity T_R."""
    scratch = copy.deepcopy(net)
    e_c = target - scratch.forward(u)
    scratch.backward()
    scratch.compute_internal_errors(ErrorPath().signal(e_c))
    eta = 1.0
    deltas = scratch.update(eta)
    direction = np.concatenate([d.ravel() / eta for d in deltas])

    scratch = copy.deepcopy(net)
    numeric = []
    for layer, w in enumerate(scratch.weights):
        for index in np.ndindex(w.shape):
            original = w[index]
            w[index] = original + h
            upper = _unity_plant_cost(scratch, u, target)
            w[index] = original - h
            lower = _unity_plant_cost(scratch, u, target)
            w[index] = original
            numeric.append((upper - lower) / (2.0 * h))
    return _relative_error(direction, -np.asarray(numeric))


def propagation_identity_error(net: LayeredNetwork, u: np.ndarray, e_c: float) -> float:
    """max |Φ^ℓ - ω^{ℓ+1} Φ^{ℓ+1}| over hidden layers, scaled by max(1, |Φ|)."""
    net.forward(u)
    net.backward()
    errors = net.compute_internal_errors(ErrorPath().signal(e_c))
    worst = 0.0
    for layer in range(net.n_layers - 1):
        upper = layer + 1
        from_above = net.weights[upper] @ errors[upper]
        scale = max(1.0, float(np.max(np.abs(errors[layer]))))
        worst = max(worst, float(np.max(np.abs(errors[layer] - from_above))) / scale)
    return worst


def run_gradcheck(
    seed: int = 0,
    n_inputs: int = 40,
    layer_sizes: Sequence[int] = (12, 6, 1),
    output_gains: Sequence[float] | None = None,
    trials: int = 3,
) -> GradcheckReport:
    """Check internal gradients, composed update direction and deep-layer propagation on random nets."""
    rng = np.random.default_rng(seed)
    report = GradcheckReport(seed=seed, layer_sizes=list(layer_sizes))
    gradient_worst = update_worst = propagation_worst = 0.0
    for trial in range(trials):
        net = LayeredNetwork.build(n_inputs, layer_sizes, seed=seed + trial, output_gains=output_gains)
        u = rng.normal(size=n_inputs)
        target = float(rng.normal())
        gradient_worst = max(gradient_worst, internal_gradient_error(net, u))
        update_worst = max(update_worst, update_direction_error(net, u, target))
        propagation_worst = max(propagation_worst, propagation_identity_error(net, u, float(rng.normal())))

    report.results = [
        CheckResult("internal_gradients_vs_fd", gradient_worst, GRADIENT_TOL),
        CheckResult("update_direction_vs_cost_fd", update_worst, UPDATE_TOL),
        CheckResult("deep_layer_propagation", propagation_worst, PROPAGATION_TOL),
    ]
    for result in report.results:
        logger.info(
            "%s %s: error %.3e (tol %.0e)",
            "✓" if result.passed else "✗",
            result.name,
            result.error,
            result.tolerance,
        )
    return report
