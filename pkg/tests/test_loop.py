import numpy as np
import pytest
from numpy.polynomial import polynomial as P
from scipy import signal

from src.dynamics.loop import (
    LinearLoopConfig,
    check_well_posed,
    closed_loop_error,
    open_loop_error_terms,
    open_loop_identity_check,
    simulate_loop,
)
from src.dynamics.transfer_function import TransferFunction
from src.errors import ShapeError, WellPosednessError


def random_stable_loop(rng: np.random.Generator, n: int = 60) -> tuple[LinearLoopConfig, np.ndarray, np.ndarray]:
    """Strictly proper Q_R and FIR H_R with |Q_R H_R| < 1 on the unit circle (small-gain stable)."""
    q_r = TransferFunction([0.0, *rng.uniform(-0.5, 0.5, size=2)], [1.0, rng.uniform(-0.5, 0.5)])
    h_r = TransferFunction(rng.uniform(-0.2, 0.2, size=2))
    cfg = LinearLoopConfig(
        q_r=q_r,
        h_r=h_r,
        delay_T=int(rng.integers(0, 4)),
        s_d=rng.normal(size=n),
        d=rng.normal(size=n),
    )
    return cfg, rng.normal(size=n), rng.normal(size=n)


def test_unexcited_loop_has_zero_error() -> None:
    cfg = LinearLoopConfig(TransferFunction.delay(1), TransferFunction.gain(0.5), 2, np.zeros(20), np.zeros(20))
    assert np.array_equal(closed_loop_error(cfg, np.zeros(20)), np.zeros(20))


def test_disturbance_impulse_on_unity_plant_shows_up_delayed_and_negated() -> None:
    d = np.zeros(6)
    d[0] = 1.0
    cfg = LinearLoopConfig(TransferFunction.gain(1.0), TransferFunction.gain(0.0), 2, np.zeros(6), d)
    assert closed_loop_error(cfg, np.zeros(6)).tolist() == [0.0, 0.0, -1.0, 0.0, 0.0, 0.0]


def test_static_algebraic_loop_is_solved_exactly() -> None:
    cfg = LinearLoopConfig(TransferFunction.gain(1.0), TransferFunction.gain(1.0), 0, np.ones(3), np.zeros(3))
    trace = simulate_loop(cfg, np.zeros(3))
    # e = 1 - s_a, s_a = e  ->  e = 1/2
    assert trace.e_c == pytest.approx([0.5, 0.5, 0.5])
    assert trace.s_a == pytest.approx(trace.a_r)


def test_dynamic_algebraic_loop_is_rejected() -> None:
    with pytest.raises(WellPosednessError):
        check_well_posed(TransferFunction([1.0], [1.0, -0.5]), TransferFunction.gain(0.3))


def test_singular_static_loop_is_rejected() -> None:
    with pytest.raises(WellPosednessError):
        check_well_posed(TransferFunction.gain(1.0), TransferFunction.gain(-1.0))


def test_mismatched_lengths_are_rejected() -> None:
    with pytest.raises(ShapeError):
        LinearLoopConfig(TransferFunction.gain(1.0), TransferFunction.gain(0.0), 0, np.zeros(3), np.zeros(4))
    cfg = LinearLoopConfig(TransferFunction.gain(1.0), TransferFunction.gain(0.0), 0, np.zeros(3), np.zeros(3))
    with pytest.raises(ShapeError):
        closed_loop_error(cfg, np.zeros(5))


@pytest.mark.parametrize("seed", range(10))
def test_time_stepping_matches_algebraic_form(seed: int) -> None:
    cfg, a_p, _ = random_stable_loop(np.random.default_rng(seed))
    delayed = np.concatenate([np.zeros(cfg.delay_T), cfg.d])[: cfg.n_steps]
    residual = cfg.s_d - signal.lfilter(cfg.q_r.num, cfg.q_r.den, delayed + a_p)
    loop_num = P.polymul(cfg.q_r.den, cfg.h_r.den)
    loop_den = P.polyadd(loop_num, P.polymul(cfg.q_r.num, cfg.h_r.num))
    expected = signal.lfilter(loop_num, loop_den, residual)
    assert np.max(np.abs(closed_loop_error(cfg, a_p) - expected)) <= 1e-9


def test_linearity_and_superposition() -> None:
    rng = np.random.default_rng(11)
    cfg, a_p, _ = random_stable_loop(rng)
    other = rng.normal(size=cfg.n_steps)

    scaled = LinearLoopConfig(cfg.q_r, cfg.h_r, cfg.delay_T, 2.5 * cfg.s_d, 2.5 * cfg.d)
    assert closed_loop_error(scaled, 2.5 * a_p) == pytest.approx(2.5 * closed_loop_error(cfg, a_p), abs=1e-9)

    zero = np.zeros(cfg.n_steps)
    only_d1 = LinearLoopConfig(cfg.q_r, cfg.h_r, cfg.delay_T, zero, cfg.d)
    only_d2 = LinearLoopConfig(cfg.q_r, cfg.h_r, cfg.delay_T, zero, other)
    both = LinearLoopConfig(cfg.q_r, cfg.h_r, cfg.delay_T, zero, cfg.d + other)
    combined = closed_loop_error(only_d1, zero) + closed_loop_error(only_d2, zero)
    assert closed_loop_error(both, zero) == pytest.approx(combined, abs=1e-9)


def test_identity_with_matching_actions_is_exact_zero() -> None:
    cfg, a_p, _ = random_stable_loop(np.random.default_rng(5))
    e_c, q_e_o = open_loop_error_terms(cfg, a_p, a_p)
    assert np.array_equal(e_c, np.zeros(cfg.n_steps))
    assert open_loop_identity_check(cfg, a_p, a_p) == 0.0


def test_identity_on_unity_plant_equals_open_loop_error() -> None:
    rng = np.random.default_rng(2)
    n = 25
    cfg = LinearLoopConfig(TransferFunction.gain(1.0), TransferFunction.gain(0.0), 1, rng.normal(size=n), rng.normal(size=n))
    a_p, desired = rng.normal(size=n), rng.normal(size=n)
    e_c, _ = open_loop_error_terms(cfg, a_p, desired)
    assert e_c == pytest.approx(desired - a_p, abs=1e-12)


def test_identity_holds_on_100_random_stable_loops() -> None:
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100):
        cfg, a_p, desired = random_stable_loop(rng)
        worst = max(worst, open_loop_identity_check(cfg, a_p, desired))
    assert worst <= 1e-9
