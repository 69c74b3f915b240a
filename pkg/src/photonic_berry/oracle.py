"""Reference evolution that never touches the Trotter circuit.

Integrates ``i d/dt psi = H(t) psi`` for the single-photon Hamiltonian

    H = 1 - mu_b n(t).L   on modes (x, y, z),     H = 1   on mode w,

where ``(L_k)_ij = -i eps_kij`` is the l = 1 angular momentum in the
Cartesian mode basis and oscillator zero-point energies are dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .evolution import ContourSpec, segments
from .photonics import SinglePhotonState

LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_j, _i, _k] = -1.0

# L[k] is the 3x3 matrix of L_k
L = -1j * LEVI_CIVITA

_GL_NODES = (0.5 - math.sqrt(3) / 6, 0.5 + math.sqrt(3) / 6)
_CF4_A = ((3 - 2 * math.sqrt(3)) / 12, (3 + 2 * math.sqrt(3)) / 12)

METHODS = ("matrix_exponential_steps", "rk4", "rotating_frame")


class OracleConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleConfig:
    substeps_per_unit_time: int = 7000
    method: str = "matrix_exponential_steps"
    tolerance: float = 1e-10

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown oracle method {self.method!r}")
        if self.substeps_per_unit_time < 1:
            raise ValueError("substeps_per_unit_time must be >= 1")

    def refined(self) -> "OracleConfig":
        return OracleConfig(2 * self.substeps_per_unit_time, self.method, self.tolerance)


def commutator_residual() -> float:
    """Largest entry of ``[L_i, L_j] - i eps_ijk L_k`` over all i, j."""
    worst = 0.0
    for i in range(3):
        for j in range(3):
            lhs = L[i] @ L[j] - L[j] @ L[i]
            rhs = 1j * np.einsum("k,kab->ab", LEVI_CIVITA[i, j], L)
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def hamiltonian_1photon(b, mu_b: float) -> np.ndarray:
    """4x4 single-photon Hamiltonian for field ``mu_b * b``."""
    b = np.asarray(b, dtype=float)
    h = np.eye(4, dtype=complex)
    h[:3, :3] -= mu_b * np.einsum("k,kab->ab", b, L)
    return h


def zeeman_propagator(b: np.ndarray) -> np.ndarray:
    """``exp(i b.L)`` for one vector or a stack of vectors (shape (..., 3)).

    ``b.L = i [b]_x`` so the exponential is a real rotation by ``-|b|``
    about ``b``; Rodrigues' formula gives it in closed form.
    """
    b = np.asarray(b, dtype=float)
    a = np.linalg.norm(b, axis=-1)
    safe = np.where(a > 0, a, 1.0)
    n = b / safe[..., None]
    cross = np.zeros(b.shape[:-1] + (3, 3))
    cross[..., 0, 1], cross[..., 0, 2] = -n[..., 2], n[..., 1]
    cross[..., 1, 0], cross[..., 1, 2] = n[..., 2], -n[..., 0]
    cross[..., 2, 0], cross[..., 2, 1] = -n[..., 1], n[..., 0]
    s = np.sin(a)[..., None, None]
    c = (2 * np.sin(a / 2) ** 2)[..., None, None]
    eye = np.broadcast_to(np.eye(3), cross.shape)
    return (eye - s * cross + c * (cross @ cross)).astype(complex)


def exact_step(b, mu_b: float, dt: float) -> np.ndarray:
    """``exp(-i H dt)`` for a constant field, as a 4x4 matrix."""
    u = np.zeros((4, 4), dtype=complex)
    u[:3, :3] = np.exp(-1j * dt) * zeeman_propagator(mu_b * dt * np.asarray(b, float))
    u[3, 3] = np.exp(-1j * dt)
    return u


def _rotate(vectors: np.ndarray, axis: np.ndarray, angles: np.ndarray) -> np.ndarray:
    # Rodrigues rotation of one vector by many angles about a unit axis
    c, s = np.cos(angles)[:, None], np.sin(angles)[:, None]
    v = vectors[None, :]
    return v * c + np.cross(axis, vectors)[None, :] * s + \
        axis[None, :] * np.dot(axis, vectors) * (1 - c)


def _ordered_product(mats: np.ndarray) -> np.ndarray:
    """``mats[-1] @ ... @ mats[0]`` by pairwise reduction."""
    while len(mats) > 1:
        if len(mats) % 2:
            tail = mats[-1:]
            mats = mats[:-1]
        else:
            tail = None
        mats = mats[1::2] @ mats[0::2]
        if tail is not None:
            mats = np.concatenate([mats, tail])
    return mats[0]


def _segment_magnus(seg, mu_b: float, substeps: int, chunk: int = 1 << 16) -> np.ndarray:
    h = seg.duration / substeps
    a1, a2 = _CF4_A
    u = np.eye(3, dtype=complex)
    for lo in range(0, substeps, chunk):
        k = np.arange(lo, min(lo + chunk, substeps))
        n1 = _rotate(seg.initial, seg.axis, seg.rate * (k + _GL_NODES[0]) * h)
        n2 = _rotate(seg.initial, seg.axis, seg.rate * (k + _GL_NODES[1]) * h)
        # fourth-order commutator-free Magnus: the factor weighting the
        # earlier node more heavily acts first
        first = zeeman_propagator(mu_b * h * (a2 * n1 + a1 * n2))
        second = zeeman_propagator(mu_b * h * (a1 * n1 + a2 * n2))
        pairs = np.empty((2 * len(k), 3, 3), dtype=complex)
        pairs[0::2], pairs[1::2] = first, second
        u = _ordered_product(pairs) @ u
    return u


def _segment_rk4(seg, mu_b: float, substeps: int, psi: np.ndarray) -> np.ndarray:
    h = seg.duration / substeps

    def rhs(tau, v):
        n = _rotate(seg.initial, seg.axis, np.array([seg.rate * tau]))[0]
        return 1j * mu_b * (np.einsum("k,kab->ab", n, L) @ v)

    # the identity part of H only contributes a global phase, restored by the caller
    for k in range(substeps):
        tau = k * h
        k1 = rhs(tau, psi)
        k2 = rhs(tau + h / 2, psi + h / 2 * k1)
        k3 = rhs(tau + h / 2, psi + h / 2 * k2)
        k4 = rhs(tau + h, psi + h * k3)
        psi = psi + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return psi


def _segment_rotating_frame(seg, mu_b: float) -> np.ndarray:
    axis_l = np.einsum("k,kab->ab", seg.axis, L)
    h0 = -mu_b * np.einsum("k,kab->ab", seg.initial, L)
    frame = expm(-1j * seg.rate * seg.duration * axis_l)
    return frame @ expm(-1j * seg.duration * (h0 - seg.rate * axis_l))


def _evolve_once(contour: ContourSpec, cfg: OracleConfig, initial: SinglePhotonState):
    psi = np.array(initial.amplitudes[:3])
    mu_b = contour.mu_b
    for seg in segments(contour):
        m = max(1, math.ceil(seg.duration * cfg.substeps_per_unit_time))
        if cfg.method == "matrix_exponential_steps":
            psi = _segment_magnus(seg, mu_b, m) @ psi
        elif cfg.method == "rk4":
            psi = _segment_rk4(seg, mu_b, m, psi)
        else:
            psi = _segment_rotating_frame(seg, mu_b) @ psi
    phase = np.exp(-1j * contour.total_time)
    out = np.empty(4, dtype=complex)
    out[:3] = phase * psi
    out[3] = phase * initial.amplitudes[3]
    return SinglePhotonState(out)


def exact_evolve(contour: ContourSpec, cfg: OracleConfig = OracleConfig(),
                 initial: SinglePhotonState | None = None,
                 check: bool = False) -> SinglePhotonState:
    """Evolve ``initial`` around the contour without Trotterisation.

    With ``check=True`` the run is repeated at twice the substep density and
    :class:`OracleConvergenceError` is raised when the two differ by more
    than ``cfg.tolerance`` (ignored for the closed-form rotating frame).
    """
    if initial is None:
        from .experiment import prepare_initial_state
        initial = prepare_initial_state()
    out = _evolve_once(contour, cfg, initial)
    if abs(out.norm_sq - initial.norm_sq) > cfg.tolerance:
        raise OracleConvergenceError(
            f"norm drifted by {abs(out.norm_sq - initial.norm_sq):.2e}")
    if check and cfg.method != "rotating_frame":
        change = np.linalg.norm(_evolve_once(contour, cfg.refined(), initial).amplitudes
                                - out.amplitudes)
        if change > cfg.tolerance:
            raise OracleConvergenceError(
                f"refinement changed the state by {change:.2e} > {cfg.tolerance:.0e}")
    return out


def refinement_change(contour: ContourSpec, cfg: OracleConfig = OracleConfig(),
                      initial: SinglePhotonState | None = None) -> float:
    """Norm of the state change when the substep density is doubled."""
    if initial is None:
        from .experiment import prepare_initial_state
        initial = prepare_initial_state()
    a = _evolve_once(contour, cfg, initial).amplitudes
    b = _evolve_once(contour, cfg.refined(), initial).amplitudes
    return float(np.linalg.norm(a - b))
