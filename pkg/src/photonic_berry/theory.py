"""Closed-form reference values (hbar = omega = m = 1)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .evolution import ContourSpec


@dataclass(frozen=True)
class QuantumNumbers:
    n_r: int
    l: int  # noqa: E741
    m: int

    def __post_init__(self):
        if self.n_r < 0 or self.l < 0:
            raise ValueError("n_r and l must be non-negative")
        if abs(self.m) > self.l:
            raise ValueError("|m| must not exceed l")


def energy(qn: QuantumNumbers, mu_b: float) -> float:
    """Oscillator level in a field: ``2 n_r + l + 3/2 - mu_b m``."""
    return 2 * qn.n_r + qn.l + 1.5 - mu_b * qn.m


def solid_angle(theta0: float, phi0: float) -> float:
    return phi0 * (1.0 - math.cos(theta0))


def berry_phase_closed(theta0: float, phi0: float, m: int = 1) -> float:
    """Berry phase ``-m phi0 (1 - cos theta0)`` of the three-segment loop.

    No 2 pi branch is applied.
    """
    if not 0.0 <= theta0 <= math.pi:
        raise ValueError("theta0 must lie in [0, pi]")
    return -m * solid_angle(theta0, phi0)


def _sphere_point(theta, phi):
    return np.array([math.sin(theta) * math.cos(phi),
                     math.sin(theta) * math.sin(phi), math.cos(theta)])


def berry_phase_path(theta, phi, atol: float = 1e-9) -> float:
    """Trapezoid estimate of ``-int (1 - cos theta) dphi`` along a sampled loop.

    ``theta`` and ``phi`` are the polar-chart angles of the field direction
    at successive samples.  The loop must close on the sphere (a pole may be
    reached at different azimuths).
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if theta.shape != phi.shape or theta.ndim != 1 or len(theta) < 2:
        raise ValueError("theta and phi must be 1-d arrays of equal length")
    gap = np.linalg.norm(_sphere_point(theta[0], phi[0]) - _sphere_point(theta[-1], phi[-1]))
    if gap > atol:
        raise ValueError(f"path is not closed (endpoint gap {gap:.2e})")
    return -float(np.trapezoid(1.0 - np.cos(theta), phi))


def dynamical_phase(total_time: float, mu_b: float, m: int) -> float:
    """``(3 - m mu_b) T``: photon energy 5/2 plus the reference-mode 1/2."""
    if total_time < 0:
        raise ValueError("T must be non-negative")
    return (3.0 - m * mu_b) * total_time


def swept_angle(theta0: float, phi0: float) -> float:
    """Arc length of the three-segment loop on the unit sphere."""
    return 2.0 * theta0 + abs(phi0) * math.sin(theta0)


def adiabaticity_epsilon(contour: ContourSpec) -> float:
    """Non-adiabaticity ``alpha / (mu_b T)`` with ``alpha`` the swept arc length."""
    return swept_angle(contour.theta0, contour.phi0) / (contour.mu_b * contour.total_time)


def herald_probability(lam: float) -> float:
    """Chance of a single-photon herald from a two-mode squeezed vacuum, ``lam = tanh r``."""
    if not 0.0 <= lam < 1.0:
        raise ValueError("lambda must lie in [0, 1)")
    return (1.0 - lam ** 2) * lam ** 2


def wigner_w0(q, p):
    return np.exp(-(np.square(q) + np.square(p))) / np.pi


def wigner_wplus(q, p):
    r2 = np.square(q) + np.square(p)
    return np.exp(-r2) * (2.0 * r2 - 1.0) / np.pi


def polarisation_vector(theta, phi) -> np.ndarray:
    """Polarisation of the m = +1 state aligned with the field at ``(theta, phi)``."""
    ct, st = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(phi), math.sin(phi)
    return np.array([-ct * cp + 1j * sp, -ct * sp - 1j * cp, st]) / math.sqrt(2)


def berry_connection_numeric(theta_of_phi: Callable[[float], float], phi: float,
                             step: float = 1e-5) -> float:
    """``i eps^dagger . d eps / d phi`` along ``theta(phi)``, central differences."""
    plus = polarisation_vector(theta_of_phi(phi + step), phi + step)
    minus = polarisation_vector(theta_of_phi(phi - step), phi - step)
    here = polarisation_vector(theta_of_phi(phi), phi)
    deriv = (plus - minus) / (2 * step)
    return float((1j * np.vdot(here, deriv)).real)
