"""Figure-level reproduction checks at the published parameters (omega_c = 1, g = 0.1)."""

import numpy as np
import pytest

from bangbang_rabi.control import (
    Algorithm,
    SearchConfig,
    constrained_scan,
    constrained_search,
    dt_convergence,
    exhaustive_search,
    greedy_search,
    pga_search,
    sweep_omega_a,
    sweep_omega_a_sigmaz,
)
from bangbang_rabi.oracle import Schedule, compare_with_exact, oracle_compare
from bangbang_rabi.physics import (
    ModelParams,
    ProtocolKind,
    analyze_trajectory,
    free_trajectory,
    full_vs_effective_check,
)

FREE_MAX_RANGE = (0.008, 0.012)
T0_RANGE = (1.4, 1.8)
HEADLINE_RANGE = (0.25, 0.30)

# Regression values at omega_a = omega_c = 1, g = 0.1, n_max = 60, T = 15.
PGA_OPTIMUM = 0.276684
GREEDY_VALUE = 0.271976
SIGN_FLIP_OPTIMUM = 0.686649  # dt = 0.1
ORACLE_FREE_DEVIATION = 9.5e-5

ORACLE_FREE_TOL = 0.02
ORACLE_OPTIMAL_TOL = 0.03
BEAM_CONVERGENCE_TOL = 0.002


def test_free_evolution_first_maximum(default_params):
    traj = free_trajectory(default_params, 15.0, 0.01)
    analysis = analyze_trajectory(traj)
    assert FREE_MAX_RANGE[0] <= analysis.global_max <= FREE_MAX_RANGE[1]
    assert T0_RANGE[0] <= analysis.t0 <= T0_RANGE[1]


@pytest.mark.slow
def test_optimal_control_headline(default_pga_result):
    assert HEADLINE_RANGE[0] <= default_pga_result.best_photon_number <= HEADLINE_RANGE[1]
    assert default_pga_result.best_photon_number == pytest.approx(PGA_OPTIMUM, abs=1e-6)
    narrower = pga_search(SearchConfig(beam_exponent=10)).best_photon_number
    assert abs(default_pga_result.best_photon_number - narrower) < BEAM_CONVERGENCE_TOL


@pytest.mark.slow
def test_greedy_is_close_below_pga(default_pga_result):
    greedy = greedy_search(SearchConfig()).best_photon_number
    assert greedy == pytest.approx(GREEDY_VALUE, abs=1e-6)
    assert greedy <= default_pga_result.best_photon_number
    assert greedy >= 0.7 * default_pga_result.best_photon_number


@pytest.mark.slow
def test_photon_number_plateaus_while_switched_off(default_pga_result):
    traj = default_pga_result.trajectory
    photons = traj.photon_numbers
    for i in np.flatnonzero(traj.control_bits == 0):
        assert abs(photons[i] - photons[i - 1]) <= 1e-12


@pytest.mark.parametrize("length", range(1, 11))
def test_pga_with_full_beam_equals_exhaustive(default_params, length):
    cfg = SearchConfig(total_time=length * 0.2, dt=0.2, beam_exponent=length, params=default_params)
    pga = pga_search(cfg)
    exhaustive = exhaustive_search(cfg)
    assert pga.best_sequence == exhaustive.best_sequence
    assert pga.best_photon_number == exhaustive.best_photon_number


def test_full_and_effective_models_are_the_same(default_params):
    assert full_vs_effective_check(default_params, 15.0, 0.01) <= 1e-8


def test_cumulant_oracle_free_evolution(default_params):
    comparison = compare_with_exact(
        default_params, Schedule(((15.0, default_params.g),)), step=1e-3, sample_dt=0.01
    )
    assert comparison.max_abs_deviation <= ORACLE_FREE_TOL
    assert comparison.max_abs_deviation == pytest.approx(ORACLE_FREE_DEVIATION, rel=0.02)


@pytest.mark.slow
def test_cumulant_oracle_optimal_sequence(default_params, default_pga_result):
    deviation = oracle_compare(
        default_pga_result.best_sequence, default_params, ProtocolKind.SWITCH_OFF, step=1e-3
    )
    assert deviation <= ORACLE_OPTIMAL_TOL


def test_constrained_capacity_without_off_pulses(default_params):
    cfg = SearchConfig(total_time=2.0, dt=0.2, params=default_params)
    assert constrained_search(cfg, 10, 0, Algorithm.PGA).best_photon_number < 0.01


def test_greedy_can_lose_photons_with_a_few_off_pulses(default_params):
    rows = constrained_scan(SearchConfig(params=default_params), 10, range(0, 6))
    assert any(row.value_greedy < rows[0].value_greedy for row in rows[1:])


@pytest.mark.slow
def test_constrained_capacity_reaches_a_limit(default_params):
    rows = constrained_scan(SearchConfig(params=default_params), 10, range(0, 41))
    assert [row.n_0 for row in rows] == list(range(41))
    assert rows[0].value_pga < 0.01
    assert abs(rows[40].value_pga - rows[36].value_pga) < 0.002


@pytest.mark.slow
def test_pulse_duration_convergence(default_params):
    curves = dt_convergence(
        SearchConfig(params=default_params), [2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0], 0.1, 0.2
    )
    assert curves.max_gap <= 0.03


@pytest.mark.slow
def test_sign_flip_protocol_beats_free_evolution(default_params):
    free_max = float(free_trajectory(default_params, 15.0, 0.01).photon_numbers.max())
    cfg = SearchConfig(total_time=15.0, dt=0.1, protocol=ProtocolKind.SIGN_FLIP)
    optimum = pga_search(cfg).best_photon_number
    assert optimum > 5 * free_max
    assert optimum == pytest.approx(SIGN_FLIP_OPTIMUM, abs=1e-6)


@pytest.mark.slow
def test_sign_flip_sweep_decays_far_from_resonance():
    cfg = SearchConfig(total_time=15.0, dt=0.1, params=ModelParams())
    grid = sweep_omega_a_sigmaz(cfg, [1.0, 5.0, 10.0, 20.0, 40.0], [15.0])
    values = grid.values[:, 0]
    assert np.all(np.diff(values[1:]) < 0)
    assert values[-1] < 0.3 * values[0]


@pytest.mark.slow
def test_detuned_atom_generates_fewer_photons(default_params):
    grid = sweep_omega_a(SearchConfig(params=default_params), [1.0, 5.0], [5.0, 10.0, 15.0])
    assert np.all(grid.values[1] < grid.values[0])
