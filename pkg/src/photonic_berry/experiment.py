"""Four-mode interferometer: preparation, evolution, readout, phase extraction.

The signal arm (modes x, y, z) carries the m = +1 "donut" component around
the field loop while the reference mode w only picks up the free
oscillator phase.  Recombining x with w on a balanced beam splitter turns
the relative phase ``Delta`` into a Mach-Zehnder fringe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .evolution import ContourSpec, TrotterConfig, build_evolution_circuit
from .photonics import (BeamSplitter, PassiveCircuit, PhaseShift, ShotSample,
                        SinglePhotonState, detection_probabilities, run_circuit,
                        sample_counts)

TWO_PI = 2.0 * math.pi
# extra reference-arm phase for the second run of the two-run estimator
QUADRATURE_PHASE = math.pi / 2
ESTIMATORS = ("exact_arg", "arccos_counts", "two_run_tan")


def wrap_phase(angle: float) -> float:
    """Map an angle onto (-pi, pi]."""
    r = math.remainder(angle, TWO_PI)
    return r + TWO_PI if r <= -math.pi else r


def nearest_branch(angle: float, reference: float) -> Tuple[float, int]:
    """Shift ``angle`` by ``2 pi k`` to land closest to ``reference``."""
    k = round((reference - angle) / TWO_PI)
    return angle + TWO_PI * k, k


def derive_seed(seed: int, *keys: int) -> int:
    """Independent 64-bit child seed for a labelled sub-run."""
    ss = np.random.SeedSequence([int(seed), *(int(k) for k in keys)])
    return int(ss.generate_state(1, np.uint64)[0])


def preparation_circuit(m: int = 1) -> PassiveCircuit:
    """Gates taking a photon in mode x to ``(|x> + i m |y> + |w> + i m |z>) / 2``.

    ``m = +1`` gives the donut state on the signal arm; ``m = -1`` its
    opposite-circulation partner (used for symmetry checks).
    """
    if m not in (1, -1):
        raise ValueError("m must be +1 or -1")
    return PassiveCircuit([
        BeamSplitter("x", "y", -math.pi / 4),   # |x> -> (|x> + |y>)/sqrt2
        PhaseShift("y", m * math.pi / 2),       # imprint the factor i
        BeamSplitter("x", "w", -math.pi / 4),   # copy x onto the reference arm
        BeamSplitter("y", "z", -math.pi / 4),   # park half of y on the m=0 mode
    ])


INITIAL_STATE_REFERENCE = np.array([0.5, 0.5j, 0.5j, 0.5])


def prepare_initial_state(m: int = 1) -> SinglePhotonState:
    return run_circuit(SinglePhotonState.basis("x"), preparation_circuit(m))


def run_evolution(contour: ContourSpec, cfg: TrotterConfig,
                  initial: Optional[SinglePhotonState] = None) -> SinglePhotonState:
    if initial is None:
        initial = prepare_initial_state()
    return run_circuit(initial, build_evolution_circuit(contour, cfg))


def extract_delta_exact(state: SinglePhotonState, min_reference: float = 1e-9) -> float:
    """Relative phase ``arg(c_x / c_w)`` in (-pi, pi]."""
    cx, cw = state["x"], state["w"]
    if abs(cw) <= min_reference:
        raise ValueError("reference amplitude vanished; the photon left the protocol subspace")
    return wrap_phase(math.atan2((cx / cw).imag, (cx / cw).real))


def subspace_leakage(state: SinglePhotonState) -> float:
    """Weight on modes y, z in excess of the 1/2 put there by the preparation."""
    p = detection_probabilities(state)
    return float(p[1] + p[2] - 0.5)


def readout_circuit(reference_phase: float = 0.0) -> PassiveCircuit:
    gates = [PhaseShift("w", reference_phase)] if reference_phase else []
    gates.append(BeamSplitter("x", "w", math.pi / 4))
    return PassiveCircuit(gates)


def readout_probabilities(state: SinglePhotonState, reference_phase: float = 0.0) -> np.ndarray:
    """Click probabilities on (x, y, z, w) after the recombining beam splitter.

    The signal detector is x (``(1 + cos Delta) / 4``), the reference
    detector is w (``(1 - cos Delta) / 4``).
    """
    return detection_probabilities(run_circuit(state, readout_circuit(reference_phase)))


def readout_counts(state: SinglePhotonState, shots: int, seed: int,
                   reference_phase: float = 0.0) -> Tuple[int, int]:
    """Sampled ``(N_sig, N_ref)`` for ``shots`` photons."""
    sample = sample_counts(readout_probabilities(state, reference_phase), shots, seed)
    return sample.counts["x"], sample.counts["w"]


def expected_counts(state: SinglePhotonState, shots: float = 1.0,
                    reference_phase: float = 0.0) -> Tuple[float, float]:
    p = readout_probabilities(state, reference_phase)
    return shots * float(p[0]), shots * float(p[3])


def delta_from_counts(n_sig: float, n_ref: float) -> float:
    """Unsigned ``|Delta| = arccos((N_sig - N_ref) / (N_sig + N_ref))``."""
    total = n_sig + n_ref
    if total <= 0:
        raise ValueError("no photons on the signal or reference detector")
    return math.acos(min(1.0, max(-1.0, (n_sig - n_ref) / total)))


def delta_from_two_runs(n_sig: float, n_ref: float,
                        n_sig_q: float, n_ref_q: float) -> float:
    """Signed ``Delta`` from a plain run and one with ``R_w(pi/2)`` added.

    With ``c = (N_sig - N_ref)/N`` and ``s = (N'_ref - N'_sig)/N'`` the second
    run measures ``s = -sin Delta``, so ``Delta = -atan2(s, c)``.
    """
    total, total_q = n_sig + n_ref, n_sig_q + n_ref_q
    if total <= 0 or total_q <= 0:
        raise ValueError("no photons on the signal or reference detector")
    c = (n_sig - n_ref) / total
    s = (n_ref_q - n_sig_q) / total_q
    return wrap_phase(-math.atan2(s, c))


def two_run_sigma(n_sig, n_ref, n_sig_q, n_ref_q) -> float:
    """1-sigma binomial uncertainty of :func:`delta_from_two_runs`."""
    total, total_q = n_sig + n_ref, n_sig_q + n_ref_q
    c = (n_sig - n_ref) / total
    s = (n_ref_q - n_sig_q) / total_q
    var_c = max(1.0 - c * c, 0.0) / total
    var_s = max(1.0 - s * s, 0.0) / total_q
    r2 = c * c + s * s
    if r2 == 0:
        return math.pi
    return math.sqrt(s * s * var_c + c * c * var_s) / r2


def arccos_sigma(n_sig, n_ref) -> float:
    # d arccos(c)/dc = -1/sqrt(1-c^2) cancels the binomial spread of c
    return 1.0 / math.sqrt(n_sig + n_ref)


def geometric_phase(delta: float, contour: ContourSpec, total_time: Optional[float] = None,
                    reference: Optional[float] = None) -> Tuple[float, int]:
    """Strip the adiabatic dynamical phase from ``Delta``.

    Returns ``(xi, winding)``: ``xi = Delta - polarity (mu_b T mod 2 pi)``
    re-wrapped to (-pi, pi] and then moved by ``2 pi winding`` onto the
    branch nearest ``reference`` (no shift when ``reference`` is None).
    """
    T = contour.total_time if total_time is None else total_time
    xi = wrap_phase(delta - contour.polarity * math.fmod(contour.mu_b * T, TWO_PI))
    if reference is None:
        return xi, 0
    return nearest_branch(xi, reference)


def aa_average(xi_plus: float, xi_minus: float) -> float:
    return 0.5 * (xi_plus + xi_minus)


def nonadiabatic_f(delta: float, contour: ContourSpec, gamma_theory: float) -> float:
    """Diagnostic ``polarity (Delta - gamma) / mu_b``; tends to T when adiabatic."""
    return contour.polarity * (delta - gamma_theory) / contour.mu_b


@dataclass(frozen=True)
class ExperimentResult:
    final_state: SinglePhotonState
    delta: float
    xi: float
    winding: int
    estimator: str
    contour: ContourSpec
    cfg: TrotterConfig
    leakage: float
    counts: Tuple[ShotSample, ...] = ()
    stat_sigma: Optional[float] = None
    seed: Optional[int] = None
    metadata: dict = field(default_factory=dict, compare=False)


def run_experiment(contour: ContourSpec, cfg: TrotterConfig, *,
                   estimator: str = "exact_arg", shots: Optional[int] = None,
                   seed: Optional[int] = None, reference: Optional[float] = None,
                   arccos_sign: int = 1,
                   initial: Optional[SinglePhotonState] = None) -> ExperimentResult:
    """Run one polarity of the interferometer and extract ``Delta`` and ``xi``.

    ``shots=None`` is the exact backend: count-based estimators then use the
    expected (infinite-statistics) detector rates.  With ``shots`` set the
    detector clicks are sampled from ``seed``; the two-run estimator draws
    its runs from independent child seeds.
    """
    if estimator not in ESTIMATORS:
        raise ValueError(f"unknown estimator {estimator!r}")
    if shots is not None and estimator == "exact_arg":
        raise ValueError("exact_arg needs the exact backend (shots=None)")
    if shots is not None and seed is None:
        raise ValueError("a seed is required for sampled runs")
    circuit = build_evolution_circuit(contour, cfg)
    state = run_circuit(prepare_initial_state() if initial is None else initial, circuit)
    meta = dict(circuit.metadata)
    samples = []
    sigma = None
    if estimator == "exact_arg":
        delta = extract_delta_exact(state)
    else:
        runs = [0.0] if estimator == "arccos_counts" else [0.0, QUADRATURE_PHASE]
        counts = []
        for r, phase in enumerate(runs):
            if shots is None:
                counts.extend(expected_counts(state, 1.0, phase))
            else:
                sub = sample_counts(readout_probabilities(state, phase), shots,
                                    derive_seed(seed, r))
                samples.append(sub)
                counts.extend((sub.counts["x"], sub.counts["w"]))
        if estimator == "arccos_counts":
            delta = wrap_phase(arccos_sign * delta_from_counts(*counts))
            if shots is not None:
                sigma = arccos_sigma(*counts)
        else:
            delta = delta_from_two_runs(*counts)
            meta["two_run_convention"] = "second run adds R_w(+pi/2); Delta = -atan2(s, c)"
            if shots is not None:
                sigma = two_run_sigma(*counts)
    xi, winding = geometric_phase(delta, contour, reference=reference)
    return ExperimentResult(state, delta, xi, winding, estimator, contour, cfg,
                            subspace_leakage(state), tuple(samples), sigma, seed,
                            metadata=meta)


@dataclass(frozen=True)
class AAPair:
    xi_plus: float
    xi_minus: float
    gamma_avg: float
    plus: Optional[ExperimentResult] = field(default=None, compare=False, repr=False)
    minus: Optional[ExperimentResult] = field(default=None, compare=False, repr=False)

    @property
    def stat_sigma(self) -> Optional[float]:
        if self.plus is None or self.plus.stat_sigma is None:
            return None
        return 0.5 * math.hypot(self.plus.stat_sigma, self.minus.stat_sigma)


def run_aa_pair(contour: ContourSpec, cfg: TrotterConfig, *,
                estimator: str = "exact_arg", shots: Optional[int] = None,
                seed: Optional[int] = None, reference: Optional[float] = None) -> AAPair:
    """Run the contour and its mirror and average the two total phases.

    ``xi_minus`` is placed on the branch nearest ``xi_plus`` so the average
    is taken consistently; ``reference`` picks the branch of ``xi_plus``.
    """
    base = contour if contour.polarity == 1 else contour.mirrored()
    seeds = (None, None) if seed is None else (derive_seed(seed, 1), derive_seed(seed, 2))
    plus = run_experiment(base, cfg, estimator=estimator, shots=shots,
                          seed=seeds[0], reference=reference)
    minus = run_experiment(base.mirrored(), cfg, estimator=estimator, shots=shots,
                           seed=seeds[1], reference=plus.xi)
    return AAPair(plus.xi, minus.xi, aa_average(plus.xi, minus.xi), plus, minus)
