import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm
from scipy.stats import chi2

from photonic_berry.oracle import L
from photonic_berry.photonics import (BeamSplitter, PassiveCircuit, PhaseShift,
                                      SinglePhotonState, apply_gate, bs_single_photon_matrix,
                                      compose, detection_probabilities, mode_index,
                                      run_circuit, sample_counts, unitarity_error)

angles = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)
modes = st.sampled_from("xyzw")


@st.composite
def gates(draw):
    if draw(st.booleans()):
        i, j = draw(st.lists(modes, min_size=2, max_size=2, unique=True))
        return BeamSplitter(i, j, draw(angles), draw(angles))
    return PhaseShift(draw(modes), draw(angles))


@st.composite
def states(draw):
    re = draw(st.lists(st.floats(-1, 1), min_size=4, max_size=4))
    im = draw(st.lists(st.floats(-1, 1), min_size=4, max_size=4))
    v = np.array(re) + 1j * np.array(im)
    n = np.linalg.norm(v)
    if n < 1e-3:
        v, n = np.array([1, 0, 0, 0], complex), 1.0
    return SinglePhotonState(v / n)


def test_mode_labels_bijective():
    assert [mode_index(m) for m in "xyzw"] == [0, 1, 2, 3]
    assert mode_index(2) == 2
    with pytest.raises(ValueError):
        mode_index("q")


def test_bs_identity_at_zero_angle():
    for phi in (0.0, 0.7, -2.0):
        assert np.allclose(bs_single_photon_matrix(0.0, phi), np.eye(2))


def test_bs_balanced_split():
    out = bs_single_photon_matrix(math.pi / 4) @ np.array([1, 0])
    assert np.allclose(out, [1 / math.sqrt(2), -1 / math.sqrt(2)])


def test_bs_quarter_period_swap():
    assert np.allclose(bs_single_photon_matrix(math.pi / 2), [[0, 1], [-1, 0]])


@given(angles, angles)
def test_bs_unitary_with_unit_determinant(theta, phi):
    u = bs_single_photon_matrix(theta, phi)
    assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-13)
    assert abs(np.linalg.det(u) - 1) < 1e-13


def test_phase_shift_on_y():
    out = apply_gate(SinglePhotonState.basis("y"), PhaseShift("y", math.pi / 2))
    assert np.allclose(out.amplitudes, [0, 1j, 0, 0])


@given(states())
def test_zero_beam_splitter_is_identity(state):
    out = apply_gate(state, BeamSplitter("x", "y", 0.0, 0.0))
    assert np.allclose(out.amplitudes, state.amplitudes, atol=0, rtol=0)


@given(states())
def test_inverse_beam_splitter_pair(state):
    out = run_circuit(state, [BeamSplitter("x", "y", math.pi / 4), BeamSplitter("x", "y", -math.pi / 4)])
    assert np.allclose(out.amplitudes, state.amplitudes, atol=1e-14)


def test_rejects_non_finite_amplitudes():
    with pytest.raises(ValueError):
        SinglePhotonState([np.nan, 0, 0, 0])


def test_beam_splitter_needs_distinct_modes():
    with pytest.raises(ValueError):
        BeamSplitter("x", "x", 0.1)


def test_compose_empty_and_single_phase():
    assert np.allclose(compose(PassiveCircuit([])), np.eye(4))
    assert np.allclose(compose([PhaseShift("x", math.pi)]), np.diag([-1, 1, 1, 1]))


def test_two_gate_preparation():
    out = run_circuit(SinglePhotonState.basis("x"),
                      [BeamSplitter("x", "y", -math.pi / 4), PhaseShift("y", math.pi / 2)])
    assert np.allclose(out.amplitudes, [1 / math.sqrt(2), 1j / math.sqrt(2), 0, 0])


def test_detection_probabilities():
    assert np.allclose(detection_probabilities(SinglePhotonState.basis("x")), [1, 0, 0, 0])
    s = SinglePhotonState([1 / math.sqrt(2), 1j / math.sqrt(2), 0, 0])
    assert np.allclose(detection_probabilities(s), [0.5, 0.5, 0, 0])


@settings(max_examples=50)
@given(states(), st.lists(gates(), min_size=1, max_size=40))
def test_norm_preserved_and_run_matches_compose(state, gate_list):
    out = run_circuit(state, gate_list)
    assert abs(out.norm_sq - 1) < 1e-12
    assert np.allclose(out.amplitudes, compose(gate_list) @ state.amplitudes, atol=1e-12)


def test_unitarity_over_ten_thousand_gates():
    rng = np.random.default_rng(7)
    gate_list = []
    for _ in range(10_000):
        if rng.random() < 0.5:
            i, j = rng.choice(4, size=2, replace=False)
            gate_list.append(BeamSplitter(int(i), int(j), rng.uniform(-3, 3), rng.uniform(-3, 3)))
        else:
            gate_list.append(PhaseShift(int(rng.integers(4)), rng.uniform(-3, 3)))
    assert unitarity_error(compose(gate_list)) <= 1e-10
    out = run_circuit(SinglePhotonState.basis("x"), gate_list)
    assert abs(out.norm_sq - 1) <= 1e-10


def _zeeman_block(b, dt):
    u = compose([BeamSplitter("y", "z", b[0] * dt), BeamSplitter("z", "x", b[1] * dt),
                 BeamSplitter("x", "y", b[2] * dt)])
    return u[:3, :3]


def test_single_beam_splitter_generates_lz():
    eps = 0.013
    assert np.allclose(compose([BeamSplitter("x", "y", eps)])[:3, :3], expm(1j * eps * L[2]), atol=1e-14)


@settings(max_examples=25, deadline=None)
@given(st.floats(0, math.pi), st.floats(0, 2 * math.pi))
def test_generator_equivalence_second_order(theta, phi):
    b = np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])
    dts = np.array([0.1, 0.05, 0.025, 0.0125])
    errs = np.array([np.max(np.abs(_zeeman_block(b, dt) - expm(1j * dt * np.einsum("k,kab->ab", b, L))))
                     for dt in dts])
    c = errs / dts ** 2
    # error is O(dt^2): the fitted constant stays bounded as dt shrinks
    assert np.all(c <= 0.6)
    if errs[0] > 1e-10:
        assert c[-1] == pytest.approx(c[0], rel=0.2)


def test_sample_counts_degenerate():
    s = sample_counts([1, 0, 0, 0], 1000, seed=3)
    assert s.as_array().tolist() == [1000, 0, 0, 0]
    assert sum(s.counts.values()) == s.shots == 1000


def test_sample_counts_deterministic():
    a = sample_counts([0.5, 0.5, 0, 0], 1000, seed=11)
    b = sample_counts([0.5, 0.5, 0, 0], 1000, seed=11)
    assert a == b


def test_sample_counts_binomial_window():
    inside = 0
    for seed in range(100):
        s = sample_counts([0.5, 0.5, 0, 0], 10 ** 6, seed=seed)
        inside += 0.4985 <= s.counts["x"] / 10 ** 6 <= 0.5015
    assert inside >= 99


def test_sample_counts_rejects_negative():
    with pytest.raises(ValueError):
        sample_counts([1.1, -0.1, 0, 0], 10, seed=0)
    sample_counts([1.0, -1e-13, 0, 0], 10, seed=0)


def test_sampler_chi_square_consistency():
    probs = np.array([0.1, 0.2, 0.3, 0.4])
    shots = 5000
    rejected = 0
    for seed in range(100):
        counts = sample_counts(probs, shots, seed).as_array()
        stat = np.sum((counts - shots * probs) ** 2 / (shots * probs))
        rejected += chi2.sf(stat, df=3) < 0.001
    # at alpha = 0.001 over 100 seeds, more than two rejections is already p < 0.0002
    assert rejected <= 2
