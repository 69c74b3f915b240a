"""Magnetic-field contour and its compilation into Trotterised passive circuits.

Units: hbar = omega = m = 1.  The field is ``mu_b * n(t)`` with ``n`` a unit
vector following a three-segment loop on the sphere: tilt from the pole
down to polar angle ``theta0`` (duration ``t1``), sweep the azimuth through
``phi0`` (``t2``), tilt back up to the pole (``t3``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Optional

import numpy as np

from .photonics import BeamSplitter, PassiveCircuit, PhaseShift

FieldFn = Callable[[float], np.ndarray]


@dataclass(frozen=True)
class ContourSpec:
    theta0: float
    phi0: float
    t1: float
    t2: float
    t3: float
    polarity: int = 1
    mu_b: float = 1.0

    def __post_init__(self):
        if min(self.t1, self.t2, self.t3) < 0:
            raise ValueError("segment durations must be non-negative")
        if self.total_time <= 0:
            raise ValueError("total time must be positive")
        if not 0.0 <= self.theta0 <= math.pi:
            raise ValueError("theta0 must lie in [0, pi]")
        if self.polarity not in (1, -1):
            raise ValueError("polarity must be +1 or -1")
        if not self.mu_b > 0:
            raise ValueError("mu_b must be positive")

    @classmethod
    def equal_segments(cls, theta0: float, phi0: float, total_time: float,
                       polarity: int = 1, mu_b: float = 1.0) -> "ContourSpec":
        """Contour with ``t1 = t2 = t3 = total_time / 3``."""
        t = total_time / 3.0
        return cls(theta0, phi0, t, t, t, polarity, mu_b)

    @property
    def total_time(self) -> float:
        return self.t1 + self.t2 + self.t3

    def mirrored(self) -> "ContourSpec":
        """The anti-polar contour, ``B(t) -> -B(t)``."""
        return ContourSpec(self.theta0, self.phi0, self.t1, self.t2, self.t3,
                           -self.polarity, self.mu_b)

    @property
    def solid_angle(self) -> float:
        return self.phi0 * (1.0 - math.cos(self.theta0))


class Segment(NamedTuple):
    """One leg of the contour: the direction rotates rigidly about ``axis``."""

    start: float
    duration: float
    initial: np.ndarray
    axis: np.ndarray
    rate: float


def _polar_direction(theta: float, phi: float) -> np.ndarray:
    st = math.sin(theta)
    return np.array([st * math.cos(phi), st * math.sin(phi), math.cos(theta)])


def field_direction(contour: ContourSpec, t: float) -> np.ndarray:
    """Unit field direction at time ``t`` (polarity included)."""
    c = contour
    T = c.total_time
    if not -1e-12 * T <= t <= T * (1 + 1e-12):
        raise ValueError(f"t={t} outside [0, {T}]")
    t = min(max(t, 0.0), T)
    if c.t1 > 0 and t <= c.t1:
        n = _polar_direction(t / c.t1 * c.theta0, 0.0)
    elif c.t3 == 0 or t <= T - c.t3:
        frac = (t - c.t1) / c.t2 if c.t2 > 0 else 1.0
        n = _polar_direction(c.theta0, frac * c.phi0)
    else:
        n = _polar_direction((T - t) / c.t3 * c.theta0, c.phi0)
    return c.polarity * n


def segments(contour: ContourSpec) -> List[Segment]:
    """Describe each non-empty leg as a uniform rotation of the field.

    Used by exact solvers: on each leg the Hamiltonian is a rigid rotation
    of a constant one, so it can be integrated in the co-rotating frame.
    """
    c = contour
    s = c.polarity
    out = []
    if c.t1 > 0:
        out.append(Segment(0.0, c.t1, s * _polar_direction(0.0, 0.0),
                           np.array([0.0, 1.0, 0.0]), c.theta0 / c.t1))
    if c.t2 > 0:
        out.append(Segment(c.t1, c.t2, s * _polar_direction(c.theta0, 0.0),
                           np.array([0.0, 0.0, 1.0]), c.phi0 / c.t2))
    if c.t3 > 0:
        axis = np.array([-math.sin(c.phi0), math.cos(c.phi0), 0.0])
        out.append(Segment(c.t1 + c.t2, c.t3, s * _polar_direction(c.theta0, c.phi0),
                           axis, -c.theta0 / c.t3))
    return out


def contour_path(contour: ContourSpec, n: int = 10_000):
    """Sample the loop as ``(theta, phi)`` arrays in the polar chart.

    Polarity is ignored: the chart describes the polar loop itself.
    """
    c = contour
    T = c.total_time
    t = np.linspace(0.0, T, n)
    theta = np.empty(n)
    phi = np.empty(n)
    seg1 = t <= c.t1
    seg3 = (t >= T - c.t3) & ~seg1 if c.t3 > 0 else np.zeros(n, bool)
    seg2 = ~seg1 & ~seg3
    if c.t1 > 0:
        theta[seg1] = t[seg1] / c.t1 * c.theta0
    else:
        theta[seg1] = c.theta0
    phi[seg1] = 0.0
    theta[seg2] = c.theta0
    phi[seg2] = (t[seg2] - c.t1) / c.t2 * c.phi0 if c.t2 > 0 else c.phi0
    if c.t3 > 0:
        theta[seg3] = (T - t[seg3]) / c.t3 * c.theta0
    phi[seg3] = c.phi0
    return theta, phi


@dataclass(frozen=True)
class TrotterConfig:
    """Trotter step settings.

    ``field_sampling`` defaults to the left endpoint for first order and to
    the step midpoint for the Strang (second-order) gadget.
    """

    dt: float
    order: int = 2
    field_sampling: Optional[str] = None

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        if self.field_sampling is None:
            object.__setattr__(self, "field_sampling",
                               "left_endpoint" if self.order == 1 else "midpoint")
        if self.field_sampling not in ("left_endpoint", "midpoint"):
            raise ValueError(f"unknown field_sampling {self.field_sampling!r}")

    def steps(self, total_time: float) -> int:
        if self.dt > total_time * (1 + 1e-12):
            raise ValueError("dt exceeds the total time")
        n = round(total_time / self.dt)
        if n < 1:
            raise ValueError("contour compiles to zero Trotter steps")
        return n


def _oscillator_half(dt: float):
    return [PhaseShift(m, -dt / 2) for m in ("x", "y", "z")]


def _zeeman_factors(b: np.ndarray, mu_b: float, dt: float, reverse: bool = False):
    # exp(i mu dt B.L) ~ BS_yz(mu B_x dt) BS_zx(mu B_y dt) BS_xy(mu B_z dt)
    gates = [BeamSplitter("y", "z", mu_b * b[0] * dt),
             BeamSplitter("z", "x", mu_b * b[1] * dt),
             BeamSplitter("x", "y", mu_b * b[2] * dt)]
    return gates[::-1] if reverse else gates


def gadget_first_order(b, mu_b: float, dt: float, reverse: bool = False) -> list:
    """Passive first-order gadget for one step of length ``dt``.

    Free-oscillator half rotations sandwich the three beam splitters that
    generate ``exp(i mu dt B.L)``.  ``reverse`` flips the beam-splitter order
    (used for the mirrored half of the Strang step).
    """
    b = np.asarray(b, dtype=float)
    return (_oscillator_half(dt) + _zeeman_factors(b, mu_b, dt, reverse)
            + _oscillator_half(dt))


def _sample_time(t: float, dt: float, field_sampling: str) -> float:
    return t + dt / 2 if field_sampling == "midpoint" else t


def gadget_strang(b_fn: FieldFn, t: float, mu_b: float, dt: float,
                  field_sampling: str = "midpoint") -> list:
    """Symmetric second-order step from ``t`` to ``t + dt``.

    Two half-step first-order gadgets, the second with reversed
    beam-splitter order, so the step is palindromic.  Both halves use the
    field sampled once per step.
    """
    b = np.asarray(b_fn(_sample_time(t, dt, field_sampling)), dtype=float)
    return (gadget_first_order(b, mu_b, dt / 2)
            + gadget_first_order(b, mu_b, dt / 2, reverse=True))


def build_evolution_circuit(contour: ContourSpec, cfg: TrotterConfig) -> PassiveCircuit:
    """Trotterised evolution around ``contour`` on modes x, y, z.

    The reference mode ``w`` gets a free rotation ``R_w(-dt)`` per step so
    it accumulates the same oscillator phase as the signal arm.  The step
    is stretched to ``T / N`` so the loop closes exactly.
    """
    T = contour.total_time
    n = cfg.steps(T)
    dt = T / n

    def b_fn(s):
        return field_direction(contour, s)

    gates = []
    for k in range(n):
        t = k * dt
        if cfg.order == 1:
            b = b_fn(_sample_time(t, dt, cfg.field_sampling))
            gates.extend(gadget_first_order(b, contour.mu_b, dt))
        else:
            gates.extend(gadget_strang(b_fn, t, contour.mu_b, dt, cfg.field_sampling))
        gates.append(PhaseShift("w", -dt))
    meta = {"n_steps": n, "dt": dt, "mu_b_dt": contour.mu_b * dt,
            "order": cfg.order, "field_sampling": cfg.field_sampling}
    return PassiveCircuit(gates, metadata=meta)
