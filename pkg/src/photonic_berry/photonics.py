"""Passive linear optics on a single photon spread over four modes.

A single photon in a passive (photon-number conserving) network is fully
described by one complex amplitude per mode, so every gate reduces to a
small unitary acting on that amplitude vector.  Modes are labelled
``x, y, z`` (the orbital angular momentum register) and ``w`` (the
reference arm of the interferometer).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

MODE_LABELS = ("x", "y", "z", "w")
MODE_INDEX = {label: k for k, label in enumerate(MODE_LABELS)}
N_MODES = 4

GATE_ATOL = 1e-12
CIRCUIT_ATOL = 1e-10

Mode = Union[str, int]


def mode_index(mode: Mode) -> int:
    """Map a mode label (``'x'``..``'w'``) or index (0..3) to its index."""
    if isinstance(mode, str):
        try:
            return MODE_INDEX[mode]
        except KeyError:
            raise ValueError(f"unknown mode label {mode!r}") from None
    k = int(mode)
    if not 0 <= k < N_MODES:
        raise ValueError(f"mode index {mode} out of range")
    return k


def mode_label(index: int) -> str:
    return MODE_LABELS[index]


@dataclass(frozen=True)
class SinglePhotonState:
    """Which-mode wavefunction of one photon: four complex amplitudes."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape != (N_MODES,):
            raise ValueError(f"expected {N_MODES} amplitudes, got {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, mode: Mode) -> "SinglePhotonState":
        amps = np.zeros(N_MODES, dtype=complex)
        amps[mode_index(mode)] = 1.0
        return cls(amps)

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def __getitem__(self, mode: Mode) -> complex:
        return complex(self.amplitudes[mode_index(mode)])

    def fidelity(self, other: "SinglePhotonState") -> float:
        """Global-phase invariant overlap ``|<self|other>|^2``."""
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)


@dataclass(frozen=True)
class BeamSplitter:
    """``BS_{i,j}(theta, phi)`` mixing the amplitudes of modes ``i`` and ``j``."""

    i: int
    j: int
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        i, j = mode_index(self.i), mode_index(self.j)
        if i == j:
            raise ValueError("beam splitter needs two distinct modes")
        object.__setattr__(self, "i", i)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "phi", float(self.phi))

    def matrix(self) -> np.ndarray:
        return bs_single_photon_matrix(self.theta, self.phi)


@dataclass(frozen=True)
class PhaseShift:
    """``R_i(phi)``: multiplies the amplitude on mode ``i`` by ``exp(i phi)``."""

    i: int
    phi: float

    def __post_init__(self):
        object.__setattr__(self, "i", mode_index(self.i))
        object.__setattr__(self, "phi", float(self.phi))


PassiveGate = Union[BeamSplitter, PhaseShift]


@dataclass(frozen=True)
class PassiveCircuit:
    """Ordered gate list; ``gates[0]`` acts first.

    ``metadata`` carries builder bookkeeping (step count, step size, ...)
    and plays no role in the optics.
    """

    gates: tuple = ()
    n_modes: int = N_MODES
    metadata: Mapping = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.n_modes != N_MODES:
            raise ValueError("only four-mode circuits are supported")

    def __len__(self):
        return len(self.gates)

    def __add__(self, other: "PassiveCircuit") -> "PassiveCircuit":
        return PassiveCircuit(self.gates + other.gates, self.n_modes)


def bs_single_photon_matrix(theta: float, phi: float = 0.0) -> np.ndarray:
    r"""Single-photon action of ``exp[theta (e^{i phi} a_i a_j^\dagger - h.c.)]``.

    Returns ``[[cos, e^{i phi} sin], [-e^{-i phi} sin, cos]]`` acting on the
    amplitude pair ``(c_i, c_j)``.  With ``phi = 0`` this is a real rotation,
    so ``BS_{x,y}(a)`` equals ``exp(i a L_z)`` on the ``(x, y)`` amplitudes.
    """
    c, s = np.cos(theta), np.sin(theta)
    e = np.exp(1j * phi)
    return np.array([[c, e * s], [-np.conj(e) * s, c]], dtype=complex)


def gate_matrix(gate: PassiveGate) -> np.ndarray:
    """Embed a gate as a 4x4 unitary on the amplitude vector."""
    u = np.eye(N_MODES, dtype=complex)
    if isinstance(gate, PhaseShift):
        u[gate.i, gate.i] = np.exp(1j * gate.phi)
    else:
        idx = [gate.i, gate.j]
        u[np.ix_(idx, idx)] = gate.matrix()
    return u


def apply_gate(state: SinglePhotonState, gate: PassiveGate,
               atol: float = GATE_ATOL) -> SinglePhotonState:
    amps = np.array(state.amplitudes)
    if isinstance(gate, PhaseShift):
        amps[gate.i] *= np.exp(1j * gate.phi)
    elif isinstance(gate, BeamSplitter):
        pair = amps[[gate.i, gate.j]]
        amps[[gate.i, gate.j]] = gate.matrix() @ pair
    else:
        raise TypeError(f"not a passive gate: {gate!r}")
    out = SinglePhotonState(amps)
    if abs(out.norm_sq - state.norm_sq) > atol:
        raise FloatingPointError("gate application broke normalisation")
    return out


def run_circuit(state: SinglePhotonState, circuit: PassiveCircuit | Iterable[PassiveGate],
                atol: float = CIRCUIT_ATOL) -> SinglePhotonState:
    """Propagate ``state`` through every gate in order.

    Equivalent to repeated :func:`apply_gate` but works on plain Python
    complex numbers, which is much faster for four amplitudes and the tens
    of thousands of gates a Trotterised evolution produces.
    """
    gates = circuit.gates if isinstance(circuit, PassiveCircuit) else tuple(circuit)
    c = [complex(a) for a in state.amplitudes]
    for g in gates:
        if type(g) is PhaseShift:
            c[g.i] *= complex(math.cos(g.phi), math.sin(g.phi))
        else:
            ct, st = math.cos(g.theta), math.sin(g.theta)
            ci, cj = c[g.i], c[g.j]
            if g.phi == 0.0:
                c[g.i] = ct * ci + st * cj
                c[g.j] = ct * cj - st * ci
            else:
                e = complex(math.cos(g.phi), math.sin(g.phi))
                c[g.i] = ct * ci + e * st * cj
                c[g.j] = ct * cj - e.conjugate() * st * ci
    out = SinglePhotonState(c)
    drift = abs(out.norm_sq - state.norm_sq)
    if drift > atol * max(1.0, len(gates) / 1e4):
        raise FloatingPointError(f"norm drifted by {drift:.2e} over {len(gates)} gates")
    return out


def compose(circuit: PassiveCircuit | Sequence[PassiveGate]) -> np.ndarray:
    """Total 4x4 unitary of a circuit (first gate applied first)."""
    gates = circuit.gates if isinstance(circuit, PassiveCircuit) else tuple(circuit)
    u = np.eye(N_MODES, dtype=complex)
    for g in gates:
        if isinstance(g, PhaseShift):
            u[g.i, :] *= np.exp(1j * g.phi)
        else:
            idx = [g.i, g.j]
            u[idx, :] = g.matrix() @ u[idx, :]
    return u


def unitarity_error(u: np.ndarray) -> float:
    """Max-norm of ``U^dagger U - I``."""
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def detection_probabilities(state: SinglePhotonState) -> np.ndarray:
    """Born-rule click probabilities for ideal mode-resolved detectors."""
    return np.abs(state.amplitudes) ** 2


@dataclass(frozen=True)
class ShotSample:
    counts: Mapping[str, int]
    shots: int
    seed: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ValueError("counts do not add up to shots")

    def as_array(self) -> np.ndarray:
        return np.array([self.counts[m] for m in MODE_LABELS], dtype=np.int64)


def sample_counts(probs, shots: int, seed: int) -> ShotSample:
    """Multinomial click statistics from a seeded PCG64 generator.

    The output is a pure function of ``(probs, shots, seed)``.
    """
    p = np.asarray(probs, dtype=float)
    if p.shape != (N_MODES,):
        raise ValueError(f"expected {N_MODES} probabilities")
    if np.any(p < -1e-12):
        raise ValueError("negative probability")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = np.clip(p, 0.0, None)
    p /= p.sum()
    rng = np.random.Generator(np.random.PCG64(seed))
    counts = rng.multinomial(int(shots), p)
    return ShotSample(dict(zip(MODE_LABELS, (int(n) for n in counts))), int(shots), int(seed))
