"""Helicoidal surface geometry and the support-function curve algebra.

A planar generating curve X(s), parametrized by arc length, sweeps out a
helicoidal surface

    F(s, t) = (R(t) X(s), h t),

where R(t) rotates the plane by angle t and h > 0 is the pitch of the screw
motion.  All curve data is carried by the support functions

    tau = <X, T>,   nu = <X, N>,   T = (cos theta, sin theta),   N = i T,

together with the tangent angle theta and the signed curvature k.  The point
itself is recovered as X = (tau + i nu) e^{i theta}.

Pitch is stored as the inverse mu = 1/h so that translation-invariant
surfaces (h = infinity) sit at the interior point mu = 0.  The singular
h -> 0 limits of the rotating and minimal families are *not* reachable
through ``Pitch``; they are provided as dedicated limit laws elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "Pitch",
    "CurveState",
    "CurvatureLaw",
    "GeneratingCurve",
    "mean_curvature",
    "prescribed_H_to_law",
    "reconstruct_point",
    "reconstruct_points",
    "surface_point",
    "first_fundamental_form",
    "second_fundamental_form",
    "unit_normal",
    "surface_tangents",
    "sample_surface",
]


@dataclass(frozen=True)
class Pitch:
    """Pitch of the helicoidal motion, stored as inverse pitch mu = 1/h.

    mu = 0 encodes the translation-invariant case h = infinity; any mu > 0
    corresponds to the finite pitch h = 1/mu.
    """

    mu: float

    def __post_init__(self):
        if not math.isfinite(self.mu) or self.mu < 0.0:
            raise ValueError(f"inverse pitch must be finite and >= 0, got {self.mu}")

    @classmethod
    def finite(cls, h: float) -> "Pitch":
        if not (h > 0.0) or not math.isfinite(h):
            raise ValueError(f"finite pitch requires h > 0, got {h}")
        return cls(1.0 / h)

    @classmethod
    def infinite(cls) -> "Pitch":
        return cls(0.0)

    @property
    def is_infinite(self) -> bool:
        return self.mu == 0.0

    @property
    def h(self) -> float:
        """The pitch h itself (math.inf when mu = 0)."""
        return math.inf if self.mu == 0.0 else 1.0 / self.mu

    def __repr__(self) -> str:
        return "Pitch(h=inf)" if self.is_infinite else f"Pitch(h={self.h:g})"


@dataclass(frozen=True)
class CurveState:
    """One arc-length sample of a generating curve."""

    s: float
    tau: float
    nu: float
    theta: float
    k: float

    @property
    def r(self) -> float:
        return math.hypot(self.tau, self.nu)

    @property
    def position(self) -> tuple[float, float]:
        return reconstruct_point(self)


@dataclass(frozen=True)
class CurvatureLaw:
    """An evaluable curvature prescription k = fn(tau, nu).

    ``min_radius`` > 0 marks laws that are singular at the origin (the
    h -> 0 limits): trajectories must stay in r >= min_radius and the ODE
    engine reports a DomainExit when they do not.
    """

    name: str
    fn: Callable[[float, float], float]
    pitch: Pitch | None = None
    params: dict = field(default_factory=dict)
    min_radius: float = 0.0

    def __call__(self, tau, nu):
        return self.fn(tau, nu)

    def in_domain(self, tau: float, nu: float) -> bool:
        return self.min_radius == 0.0 or math.hypot(tau, nu) >= self.min_radius


def mean_curvature(tau: float, nu: float, k: float, pitch: Pitch) -> float:
    """Mean curvature of the helicoidal sweep at a curve sample.

    For finite h this is -h (k (r^2 + h^2) + nu) / (tau^2 + h^2)^{3/2};
    written in mu = 1/h the same expression reads

        H = -(k (1 + mu^2 r^2) + mu^2 nu) / (1 + mu^2 tau^2)^{3/2},

    which extends smoothly to mu = 0 where it gives the planar limit -k.
    """
    mu = pitch.mu
    mu2 = mu * mu
    r2 = tau * tau + nu * nu
    num = k * (1.0 + mu2 * r2) + mu2 * nu
    den = (1.0 + mu2 * tau * tau) ** 1.5
    return -num / den


def prescribed_H_to_law(
    Psi: Callable[[float, float], float], pitch: Pitch, name: str = "prescribed"
) -> CurvatureLaw:
    """Solve the mean-curvature expression for k, turning a prescription
    H = Psi(tau, nu) into a curvature law.

    Only finite pitch is allowed here: the inversion divides by h.
    """
    if pitch.is_infinite:
        raise ValueError("prescribed-curvature inversion requires finite pitch")
    h = pitch.h

    def k_of(tau, nu):
        t2h2 = tau * tau + h * h
        r2h2 = tau * tau + nu * nu + h * h
        return -(Psi(tau, nu) * t2h2 ** 1.5 / h + nu) / r2h2

    return CurvatureLaw(name=name, fn=k_of, pitch=pitch)


def reconstruct_point(state: CurveState) -> tuple[float, float]:
    """X = (tau + i nu) e^{i theta}, returned as Euclidean coordinates."""
    c, s = math.cos(state.theta), math.sin(state.theta)
    return (state.tau * c - state.nu * s, state.tau * s + state.nu * c)


def reconstruct_points(tau, nu, theta) -> np.ndarray:
    """Vectorized reconstruction; returns an (n, 2) array."""
    tau = np.asarray(tau, dtype=float)
    nu = np.asarray(nu, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([tau * c - nu * s, tau * s + nu * c], axis=-1)


def surface_point(curve_point, t: float, pitch: Pitch) -> tuple[float, float, float]:
    """Helicoidal sweep F = (R(t) X, h t) of a plane point.

    The translation-invariant case mu = 0 is rejected: those surfaces are
    prisms X x R and are lifted by the mesh builder instead.
    """
    if pitch.is_infinite:
        raise ValueError("surface_point requires finite pitch; mu = 0 surfaces are prisms")
    x, y = float(curve_point[0]), float(curve_point[1])
    c, s = math.cos(t), math.sin(t)
    return (x * c - y * s, x * s + y * c, pitch.h * t)


def first_fundamental_form(tau: float, nu: float, pitch: Pitch) -> np.ndarray:
    """Metric of the sweep in the (s, t) coordinates; det = tau^2 + h^2."""
    if pitch.is_infinite:
        raise ValueError("fundamental forms require finite pitch")
    h = pitch.h
    r2 = tau * tau + nu * nu
    return np.array([[1.0, -nu], [-nu, r2 + h * h]])


def second_fundamental_form(tau: float, nu: float, k: float, pitch: Pitch) -> np.ndarray:
    """Second fundamental form -h/sqrt(tau^2+h^2) [[k, 1], [1, -nu]]."""
    if pitch.is_infinite:
        raise ValueError("fundamental forms require finite pitch")
    h = pitch.h
    c = -h / math.sqrt(tau * tau + h * h)
    return c * np.array([[k, 1.0], [1.0, -nu]])


def unit_normal(state: CurveState, pitch: Pitch, t: float = 0.0) -> np.ndarray:
    """Unit normal (h R(t) N, -tau) / sqrt(tau^2 + h^2) of the sweep.

    With the counterclockwise circle traced at (tau, nu) = (0, -1) this
    points at the axis: the inward convention, under which the swept
    cylinder has H = -1.
    """
    if pitch.is_infinite:
        raise ValueError("unit_normal requires finite pitch")
    h = pitch.h
    nx, ny = -math.sin(state.theta), math.cos(state.theta)  # N = i e^{i theta}
    c, s = math.cos(t), math.sin(t)
    rx, ry = nx * c - ny * s, nx * s + ny * c
    scale = 1.0 / math.sqrt(state.tau * state.tau + h * h)
    return np.array([h * rx * scale, h * ry * scale, -state.tau * scale])


def surface_tangents(state: CurveState, pitch: Pitch, t: float = 0.0):
    """Coordinate tangent vectors (dF/ds, dF/dt) of the sweep at (s, t)."""
    if pitch.is_infinite:
        raise ValueError("surface_tangents requires finite pitch")
    h = pitch.h
    tx, ty = math.cos(state.theta), math.sin(state.theta)
    x, y = reconstruct_point(state)
    c, s = math.cos(t), math.sin(t)
    dFds = np.array([tx * c - ty * s, tx * s + ty * c, 0.0])
    # dF/dt = (i R(t) X, h): rotate X by t, then by a quarter turn
    rx, ry = x * c - y * s, x * s + y * c
    dFdt = np.array([-ry, rx, h])
    return dFds, dFdt


@dataclass
class GeneratingCurve:
    """A sampled generating curve together with the law that produced it.

    Samples live at the integrator's accepted steps (or at the closed form's
    evaluation grid); ``solution`` optionally carries dense output so the
    curve can be resampled and events located between samples.
    """

    s: np.ndarray
    tau: np.ndarray
    nu: np.ndarray
    theta: np.ndarray
    k: np.ndarray
    pitch: Pitch | None
    law: CurvatureLaw | None = None
    abs_tol: float = 0.0
    rel_tol: float = 0.0
    solution: object | None = None

    def __len__(self) -> int:
        return len(self.s)

    @property
    def r(self) -> np.ndarray:
        return np.hypot(self.tau, self.nu)

    def state(self, i: int) -> CurveState:
        return CurveState(
            s=float(self.s[i]),
            tau=float(self.tau[i]),
            nu=float(self.nu[i]),
            theta=float(self.theta[i]),
            k=float(self.k[i]),
        )

    @property
    def states(self) -> list[CurveState]:
        return [self.state(i) for i in range(len(self.s))]

    def points(self) -> np.ndarray:
        """Reconstructed plane points, shape (n, 2)."""
        return reconstruct_points(self.tau, self.nu, self.theta)

    def law_residual(self) -> float:
        """max |k_i - law(tau_i, nu_i)| over the stored samples."""
        if self.law is None:
            raise ValueError("curve carries no law")
        return float(np.max(np.abs(self.k - self.law(self.tau, self.nu))))

    def mean_curvatures(self) -> np.ndarray:
        if self.pitch is None:
            raise ValueError("curve has no pitch (h -> 0 limit curve)")
        mu = self.pitch.mu
        mu2 = mu * mu
        r2 = self.tau**2 + self.nu**2
        return -(self.k * (1.0 + mu2 * r2) + mu2 * self.nu) / (1.0 + mu2 * self.tau**2) ** 1.5
