import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photonic_berry.evolution import ContourSpec, TrotterConfig
from photonic_berry.experiment import (INITIAL_STATE_REFERENCE, aa_average, delta_from_counts,
                                       delta_from_two_runs, derive_seed, expected_counts,
                                       extract_delta_exact, geometric_phase, nearest_branch,
                                       nonadiabatic_f, prepare_initial_state, readout_counts,
                                       readout_probabilities, run_aa_pair, run_evolution,
                                       run_experiment, subspace_leakage, two_run_sigma,
                                       wrap_phase)
from photonic_berry.photonics import SinglePhotonState, detection_probabilities
from photonic_berry.theory import adiabaticity_epsilon, berry_phase_closed

PI = math.pi
STRANG = TrotterConfig(0.01 * PI)


def state_with_delta(delta):
    """Prepared state with ``c_x / c_w = exp(i delta)``."""
    return SinglePhotonState([0.5 * np.exp(1j * delta), 0.5j, 0.5j, 0.5])


def test_prepared_state():
    s = prepare_initial_state()
    assert np.allclose(s.amplitudes, INITIAL_STATE_REFERENCE, atol=1e-15)
    assert s.norm_sq == pytest.approx(1.0, abs=1e-15)
    assert np.allclose(detection_probabilities(s), 0.25)


def test_prepared_state_m_minus_one():
    assert np.allclose(prepare_initial_state(-1).amplitudes, [0.5, -0.5j, -0.5j, 0.5])
    with pytest.raises(ValueError):
        prepare_initial_state(0)


def test_wrap_and_branch_helpers():
    assert wrap_phase(-PI) == PI
    assert wrap_phase(3 * PI) == pytest.approx(PI)
    value, k = nearest_branch(3.0, -3.0)
    assert k == -1 and value == pytest.approx(3.0 - 2 * PI)


@given(st.floats(-50, 50))
def test_wrap_phase_range(a):
    w = wrap_phase(a)
    assert -PI < w <= PI
    assert math.remainder(w - a, 2 * PI) == pytest.approx(0, abs=1e-9)


def test_derive_seed_is_stable_and_distinct():
    assert derive_seed(5, 1) == derive_seed(5, 1)
    assert len({derive_seed(5, k) for k in range(50)}) == 50


def test_extract_delta_exact():
    assert extract_delta_exact(prepare_initial_state()) == 0
    for a in (0.3, -2.0, PI):
        assert extract_delta_exact(state_with_delta(a)) == pytest.approx(a)
    with pytest.raises(ValueError):
        extract_delta_exact(SinglePhotonState.basis("x"))


def test_readout_fringe_examples():
    assert readout_counts(state_with_delta(0.0), 5000, seed=1)[1] == 0
    assert readout_counts(state_with_delta(PI), 5000, seed=1)[0] == 0
    n_sig, n_ref = readout_counts(state_with_delta(PI / 2), 10 ** 6, seed=2)
    assert 0.4985 <= n_sig / (n_sig + n_ref) <= 0.5015


def test_readout_dark_port_at_zero_delta():
    p = readout_probabilities(state_with_delta(0.0))
    assert p[3] == pytest.approx(0, abs=1e-15)
    assert p[0] == pytest.approx(0.5)
    assert p[1] + p[2] == pytest.approx(0.5)


def test_delta_from_counts():
    assert delta_from_counts(1000, 0) == 0
    assert delta_from_counts(0, 1000) == pytest.approx(PI)
    assert delta_from_counts(500, 500) == pytest.approx(PI / 2)
    with pytest.raises(ValueError):
        delta_from_counts(0, 0)


def _two_run_from_estimates(c, s):
    # (c, s) = ((Ns - Nr)/N, (N'r - N's)/N') with N = N' = 2
    return delta_from_two_runs(1 + c, 1 - c, 1 - s, 1 + s)


def test_two_run_quadrants():
    assert _two_run_from_estimates(1, 0) == 0
    assert _two_run_from_estimates(0, 1) == pytest.approx(-PI / 2)
    assert _two_run_from_estimates(-1, 0) == pytest.approx(PI)
    with pytest.raises(ValueError):
        delta_from_two_runs(0, 0, 1, 1)


@given(st.floats(-PI, PI).filter(lambda d: d > -PI))
def test_two_run_matches_exact_on_expected_counts(delta):
    s = state_with_delta(delta)
    counts = expected_counts(s, 1.0) + expected_counts(s, 1.0, PI / 2)
    assert abs(wrap_phase(delta_from_two_runs(*counts) - extract_delta_exact(s))) <= 1e-9


def test_two_run_convention_recorded():
    r = run_experiment(ContourSpec.equal_segments(PI / 2, 1.0, 6 * PI), STRANG, estimator="two_run_tan")
    assert "atan2" in r.metadata["two_run_convention"]


def test_two_run_sigma_scales_with_shots():
    a = two_run_sigma(600, 400, 450, 550)
    b = two_run_sigma(6000, 4000, 4500, 5500)
    assert a / b == pytest.approx(math.sqrt(10))


def test_geometric_phase_examples():
    c = ContourSpec.equal_segments(PI / 2, 1.0, 7.0)
    assert geometric_phase(math.fmod(7.0, 2 * PI), c)[0] == pytest.approx(0, abs=1e-15)
    c48 = ContourSpec.equal_segments(PI / 2, 1.0, 48 * PI)
    assert geometric_phase(1.234, c48)[0] == pytest.approx(1.234, abs=1e-12)
    xi, k = geometric_phase(3.0, c48, reference=-3.5)
    assert k == -1 and xi == pytest.approx(3.0 - 2 * PI)


def test_aa_average_examples():
    assert aa_average(-PI + 0.3, -PI - 0.3) == pytest.approx(-PI)
    assert aa_average(0.0, 0.0) == 0


def test_nonadiabatic_f_tends_to_total_time():
    c = ContourSpec.equal_segments(PI / 2, PI / 2, 48 * PI)
    gamma = berry_phase_closed(PI / 2, PI / 2)
    delta_unwrapped = c.mu_b * c.total_time + gamma
    assert nonadiabatic_f(delta_unwrapped, c, gamma) == pytest.approx(c.total_time)


def test_estimator_validation():
    c = ContourSpec.equal_segments(PI / 2, 1.0, 6 * PI)
    with pytest.raises(ValueError):
        run_experiment(c, STRANG, estimator="bogus")
    with pytest.raises(ValueError):
        run_experiment(c, STRANG, shots=100, seed=1)
    with pytest.raises(ValueError):
        run_experiment(c, STRANG, estimator="two_run_tan", shots=100)


def test_zero_area_full_period_returns_initial_state():
    c = ContourSpec.equal_segments(0.0, 0.0, 48 * PI)
    out = run_evolution(c, STRANG)
    assert out.fidelity(prepare_initial_state()) >= 1 - 1e-6


def test_adiabatic_run_fig6a_quarter_turn():
    c = ContourSpec.equal_segments(PI / 2, PI / 2, 48 * PI)
    pair = run_aa_pair(c, STRANG, reference=-PI / 2)
    # geometric part of Delta, with the polarity-odd drift removed
    assert pair.gamma_avg == pytest.approx(-PI / 2, rel=0.02)
    drift_plus = pair.xi_plus - pair.gamma_avg
    drift_minus = pair.xi_minus - pair.gamma_avg
    assert drift_plus > 0 > drift_minus
    assert drift_plus == pytest.approx(-drift_minus, rel=1e-3)


def test_adiabatic_single_polarity_half_turn():
    c = ContourSpec.equal_segments(PI / 2, PI, 48 * PI)
    r = run_experiment(c, STRANG, reference=-PI)
    assert r.xi == pytest.approx(-PI, rel=0.02)


def test_adiabatic_delta_within_epsilon_bound():
    c = ContourSpec.equal_segments(PI / 3, 1.0, 48 * PI)
    delta = run_experiment(c, STRANG).delta
    gamma = berry_phase_closed(PI / 3, 1.0)
    eps = adiabaticity_epsilon(c)
    assert abs(wrap_phase(delta - gamma)) <= eps * (2 * PI / 3 + math.sin(PI / 3))


def test_intermediate_regime_deviation_pattern():
    c = ContourSpec.equal_segments(PI / 2, 2 * PI, 12 * PI)
    pair = run_aa_pair(c, STRANG, reference=-2 * PI)
    gamma = -2 * PI
    assert 0.10 <= max(abs(pair.xi_plus - gamma), abs(pair.xi_minus - gamma)) / abs(gamma) <= 0.40
    assert abs(pair.gamma_avg - gamma) / abs(gamma) <= 0.08


def test_polarity_antisymmetry_second_order():
    gamma = -PI / 2
    ks, firsts = [], []
    for T in (24 * PI, 48 * PI, 96 * PI):
        c = ContourSpec.equal_segments(PI / 2, PI / 2, T)
        eps = adiabaticity_epsilon(c)
        assert eps <= 0.1
        pair = run_aa_pair(c, STRANG, reference=gamma)
        ks.append(abs((pair.xi_plus - gamma) + (pair.xi_minus - gamma)) / eps ** 2)
        firsts.append(abs(pair.xi_plus - gamma) / eps)
    k_fit = max(ks)
    assert k_fit < 0.1
    # individual drifts are first order: |xi - gamma| / eps stays O(1)
    assert max(firsts) / min(firsts) < 1.5 and min(firsts) > 0.5


def test_m_minus_one_symmetry():
    c = ContourSpec.equal_segments(PI / 2, PI / 2, 48 * PI)
    eps = adiabaticity_epsilon(c)
    gammas = {}
    for m in (1, -1):
        deltas = [extract_delta_exact(run_evolution(cc, STRANG, prepare_initial_state(m)))
                  for cc in (c, c.mirrored())]
        gammas[m] = aa_average(*deltas)
    assert gammas[-1] == pytest.approx(-gammas[1], abs=eps ** 2)
    assert gammas[-1] == pytest.approx(berry_phase_closed(PI / 2, PI / 2, m=-1), rel=0.02)


def test_fringe_law_constant_field():
    worst = 0.0
    for T in np.linspace(0.5, 20.0, 64):
        c = ContourSpec.equal_segments(0.0, 0.0, float(T))
        n_sig, n_ref = expected_counts(run_evolution(c, TrotterConfig(0.05)))
        worst = max(worst, abs(n_sig / (n_sig + n_ref) - (1 + math.cos(T)) / 2))
    assert worst <= 1e-10


def test_zero_area_average_vanishes():
    for theta0, phi0 in ((PI / 2, 0.0), (0.0, PI)):
        pair = run_aa_pair(ContourSpec.equal_segments(theta0, phi0, 48 * PI), STRANG, reference=0.0)
        assert abs(pair.gamma_avg) <= 1e-4


def test_leakage_diagnostic():
    assert subspace_leakage(prepare_initial_state()) == pytest.approx(0, abs=1e-15)
    fast = run_experiment(ContourSpec.equal_segments(PI / 2, 2 * PI, 6 * PI), STRANG)
    slow = run_experiment(ContourSpec.equal_segments(PI / 2, 2 * PI, 48 * PI), STRANG)
    assert abs(fast.leakage) > abs(slow.leakage)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_shot_runs_reproducible(seed):
    c = ContourSpec(PI / 2, 1.0, 2 * PI, 4 * PI, 2 * PI)
    cfg = TrotterConfig(0.1 * PI)
    a = run_aa_pair(c, cfg, estimator="two_run_tan", shots=1000, seed=seed)
    b = run_aa_pair(c, cfg, estimator="two_run_tan", shots=1000, seed=seed)
    assert a == b
    assert a.plus.counts[0] == b.plus.counts[0]
    assert a.stat_sigma is not None and a.stat_sigma > 0


def test_arccos_estimator_sign_supplied_by_caller():
    c = ContourSpec.equal_segments(PI / 2, PI / 2, 48 * PI)
    exact = run_experiment(c, STRANG).delta
    r = run_experiment(c, STRANG, estimator="arccos_counts", arccos_sign=-1)
    # the fringe visibility sees the small |c_x| / |c_w| mismatch left by leakage
    assert r.delta == pytest.approx(exact, abs=1e-6)
