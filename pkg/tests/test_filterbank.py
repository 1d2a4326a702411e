import numpy as np
import pytest
from scipy import signal

from src.dynamics.filterbank import FilterBank, bank_reset, bank_step, lowpass_new, tap_peak_steps
from src.errors import FilterParameterError, ShapeError, SignalError


@pytest.mark.parametrize("peak_step", range(3, 11))
def test_impulse_response_peaks_at_requested_step(peak_step: int) -> None:
    response = lowpass_new(peak_step, 0.51).impulse_response(200)
    assert abs(int(np.argmax(response)) - peak_step) <= 1


@pytest.mark.parametrize("peak_step", [2, 3, 10, 50, 100])
def test_poles_inside_unit_circle_and_unity_dc_gain(peak_step: int) -> None:
    tap = lowpass_new(peak_step)
    assert tap.transfer.is_stable()
    assert tap.transfer.dc_gain() == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("peak_step", [3, 10])
def test_step_response_settles_to_one(peak_step: int) -> None:
    tap = lowpass_new(peak_step)
    y = [tap.step(1.0) for _ in range(20 * peak_step)]
    assert y[-1] == pytest.approx(1.0, abs=1e-6)


def test_matches_lfilter() -> None:
    tap = lowpass_new(7)
    x = np.random.default_rng(0).normal(size=500)
    stepped = [tap.step(v) for v in x]
    assert stepped == pytest.approx(signal.lfilter(tap.num, tap.den, x), abs=1e-12)


@pytest.mark.parametrize(
    "peak_step, damping",
    [(1, 0.51), (0, 0.51), (3.5, 0.51), (3, 0.5), (3, 0.2)],
)
def test_invalid_parameters_are_rejected(peak_step, damping) -> None:
    with pytest.raises(FilterParameterError):
        lowpass_new(peak_step, damping)


@pytest.mark.parametrize(
    "lo, hi, n, expected",
    [
        (3, 10, 5, [3, 5, 7, 8, 10]),
        (5, 10, 5, [5, 6, 8, 9, 10]),
        (3, 3, 1, [3]),
        (3, 4, 3, [3, 4, 5]),
    ],
)
def test_tap_spacing(lo: int, hi: int, n: int, expected: list[int]) -> None:
    steps = tap_peak_steps(lo, hi, n)
    assert steps == expected
    assert all(b > a for a, b in zip(steps, steps[1:]))


def test_zero_input_gives_zero_output() -> None:
    bank = FilterBank.from_range(8, 5, 3, 10)
    for _ in range(20):
        assert np.array_equal(bank_step(bank, np.zeros(8)), np.zeros(40))


def test_sim_bank_has_forty_outputs() -> None:
    bank = FilterBank.from_range(8, 5, 3, 10)
    assert bank.n_outputs == 40
    assert bank_step(bank, np.ones(8)).shape == (40,)


def test_impulse_on_first_predictor_only_reaches_its_taps() -> None:
    bank = FilterBank.from_range(8, 5, 3, 10)
    n = 40
    outputs = np.zeros((n, bank.n_outputs))
    for k in range(n):
        p = np.zeros(8)
        if k == 0:
            p[0] = 1.0
        outputs[k] = bank.step(p)

    assert np.array_equal(outputs[:, 5:], np.zeros((n, 35)))
    expected = bank.impulse_responses(n)
    for tap in range(5):
        assert outputs[:, tap] == pytest.approx(expected[tap], abs=1e-12)


def test_vectorized_bank_matches_individual_filters() -> None:
    bank = FilterBank.from_range(3, 5, 3, 10)
    rng = np.random.default_rng(1)
    inputs = rng.normal(size=(100, 3))
    outputs = np.array([bank.step(p) for p in inputs])
    for index in range(bank.n_outputs):
        predictor, tap_index = divmod(index, bank.n_taps)
        tap = bank.taps[tap_index]
        assert outputs[:, index] == pytest.approx(tap.transfer.response(inputs[:, predictor]), abs=1e-12)


def test_reset_and_replay_is_deterministic() -> None:
    rng = np.random.default_rng(4)
    inputs = rng.normal(size=(30, 8))
    bank = FilterBank.from_range(8, 5, 3, 10)
    first = np.array([bank.step(p) for p in inputs])
    bank_reset(bank)
    assert np.array_equal(bank.states, np.zeros_like(bank.states))
    assert np.array_equal(bank.step(np.zeros(8)), np.zeros(40))
    bank_reset(bank)
    replay = np.array([bank.step(p) for p in inputs])
    twin = FilterBank.from_range(8, 5, 3, 10)
    twin_out = np.array([twin.step(p) for p in inputs])
    assert np.array_equal(first, replay)
    assert np.array_equal(first, twin_out)


def test_long_random_input_stays_within_l1_bound() -> None:
    bank = FilterBank.from_range(1, 5, 3, 10)
    l1 = np.abs(bank.impulse_responses(2000)).sum(axis=1)
    x = np.random.default_rng(9).uniform(-1.0, 1.0, size=10_000)
    outputs = np.array([bank.step([v]) for v in x])
    assert np.all(np.isfinite(outputs))
    assert np.all(np.abs(outputs).max(axis=0) <= l1 * (1.0 + 1e-9))


def test_linearity_per_filter() -> None:
    rng = np.random.default_rng(8)
    a, b = rng.normal(size=(50, 2)), rng.normal(size=(50, 2))
    bank_a, bank_b, bank_ab = (FilterBank.from_range(2, 5, 3, 10) for _ in range(3))
    out_a = np.array([bank_a.step(p) for p in a])
    out_b = np.array([bank_b.step(p) for p in b])
    out_ab = np.array([bank_ab.step(p) for p in a + b])
    assert out_ab == pytest.approx(out_a + out_b, abs=1e-9)


def test_wrong_predictor_count_is_rejected() -> None:
    bank = FilterBank.from_range(8, 5, 3, 10)
    with pytest.raises(ShapeError):
        bank.step(np.zeros(7))


@pytest.mark.parametrize("bad", [float("nan"), float("inf")])
def test_non_finite_predictors_are_rejected(bad: float) -> None:
    bank = FilterBank.from_range(2, 5, 3, 10)
    bank.step([0.5, -0.5])
    before = bank.states
    with pytest.raises(SignalError):
        bank.step([bad, 0.0])
    assert np.array_equal(bank.states, before)
