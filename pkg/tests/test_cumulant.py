import numpy as np
import pytest

from bangbang_rabi.oracle.cumulant import (
    CumulantState,
    Schedule,
    compare_with_exact,
    cumulant_rhs,
    initial_cumulant_state,
    integrate,
    oracle_compare,
)
from bangbang_rabi.physics.protocol import ProtocolKind
from bangbang_rabi.sequence import ControlSequence


def test_vacuum_state():
    s0 = initial_cumulant_state()
    assert (s0.gamma, s0.alpha, s0.beta, s0.kappa, s0.mu) == (1.0, 1.0, 1.0, 1.0, 1.0)
    assert (s0.x, s0.p, s0.n, s0.delta, s0.epsilon, s0.theta, s0.lambda_) == (0.0,) * 7
    assert CumulantState.from_array(s0.to_array()) == s0
    assert len(CumulantState.field_names()) == 12
    with pytest.raises(ValueError):
        CumulantState.from_array(np.zeros(11))


def test_rhs_at_vacuum():
    ds = cumulant_rhs(initial_cumulant_state(), omega_c=1.0, omega_a=1.0, g=0.1)
    assert ds.p == pytest.approx(-0.2)
    assert ds.delta == pytest.approx(-0.2)
    assert ds.x == 0.0
    assert ds.n == 0.0
    assert ds.gamma == 0.0
    assert ds.theta == 0.0


def test_vacuum_is_stationary_without_coupling():
    derivative = cumulant_rhs(initial_cumulant_state(), omega_c=1.0, omega_a=0.7, g=0.0)
    assert np.all(derivative.to_array() == 0.0)
    series = integrate(initial_cumulant_state(), Schedule(((0.5, 0.0),)), 1.0, 0.7, step=0.01)
    np.testing.assert_array_equal(series.states[-1], initial_cumulant_state().to_array())


def test_schedule_validation_and_conversion():
    with pytest.raises(ValueError):
        Schedule(((0.0, 0.1),))
    assert Schedule(((0.5, 0.1), (1.5, 0.0))).total_duration == pytest.approx(2.0)

    seq = ControlSequence.from_string("101", 0.2)
    off = Schedule.from_sequence(seq, 0.1, ProtocolKind.SWITCH_OFF)
    assert off.segments == ((0.2, 0.1), (0.2, 0.0), (0.2, 0.1))
    flipped = Schedule.from_sequence(seq, 0.1, "sign-flip")
    assert [g for _, g in flipped.segments] == [0.1, -0.1, 0.1]


def test_integrate_requires_commensurate_step():
    schedule = Schedule(((0.25, 0.1),))
    with pytest.raises(ValueError):
        integrate(initial_cumulant_state(), schedule, 1.0, 1.0, step=0.1)
    with pytest.raises(ValueError):
        integrate(initial_cumulant_state(), schedule, 1.0, 1.0, step=0.0)


def test_integrate_samples_every_step():
    schedule = Schedule(((0.1, 0.1), (0.2, 0.0)))
    series = integrate(initial_cumulant_state(), schedule, 1.0, 1.0, step=0.01)
    assert series.states.shape == (31, 12)
    np.testing.assert_allclose(series.times, np.arange(31) * 0.01, atol=1e-12)
    assert series.at(0) == initial_cumulant_state()


def test_rk4_error_drops_sixteenfold_per_step_halving():
    schedule = Schedule(((2.0, 0.1),))

    def final_state(step: float) -> np.ndarray:
        return integrate(initial_cumulant_state(), schedule, 1.0, 1.0, step=step).states[-1]

    reference = final_state(1e-4)
    coarse = np.max(np.abs(final_state(2e-2) - reference))
    fine = np.max(np.abs(final_state(1e-2) - reference))
    assert 8 <= coarse / fine <= 32


def test_short_free_evolution_agrees_with_exact(small_params):
    comparison = compare_with_exact(
        small_params, Schedule(((3.0, small_params.g),)), step=1e-3, sample_dt=0.01
    )
    assert comparison.times.size == 301
    assert comparison.max_abs_deviation <= 0.02
    assert comparison.rows()[0] == {"t": 0.0, "n_exact": 0.0, "n_oracle": 0.0}


def test_all_off_sequence_has_no_deviation(small_params):
    seq = ControlSequence.constant(0, 10, 0.2)
    assert oracle_compare(seq, small_params, ProtocolKind.SWITCH_OFF) == 0.0


def test_oracle_tracks_short_pulse_sequence(small_params):
    seq = ControlSequence.from_string("1111100111", 0.2)
    assert oracle_compare(seq, small_params, "sign-flip", step=1e-3) <= 0.03


def test_sample_dt_must_be_a_multiple_of_step(small_params):
    with pytest.raises(ValueError):
        compare_with_exact(
            small_params, Schedule(((1.0, small_params.g),)), step=1e-3, sample_dt=0.0015
        )
