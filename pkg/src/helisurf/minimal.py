"""Helicoidal minimal surfaces and their h -> 0 limit curves.

The generating curves of minimal helicoidal surfaces satisfy
k = -nu / (r^2 + h^2), and the quantity nu / sqrt(tau^2 + h^2) = A/h is
conserved along them.  That makes the curve explicit:

    X(tau) = (tau + i (A/h) sqrt(tau^2 + h^2))
             e^{-i (A/h) arsinh(tau/h) + i theta0},

with |A| the distance of the curve to the origin.  Arc length is exactly
linear in tau, s = (A^2 + h^2) tau / h^2, so the closed form needs no
numerical reparametrization; the support functions read off directly and
satisfy the curve ODE system identically.

Two h -> 0 constructions are provided: the logarithmic-spiral limit
X = s^{1-ia}/(1-ia) on s > 0, and the one-parameter family with A = a h and
a matched phase that converges to it on compact subsets of (0, infinity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import CurvatureLaw, GeneratingCurve, Pitch

__all__ = [
    "MinimalCurveSpec",
    "minimal_law",
    "minimal_h0_law",
    "minimal_closed_form",
    "wunderlich_parametrization",
    "minimal_h0_curve",
    "minimal_limit_family",
]


def minimal_law(pitch: Pitch) -> CurvatureLaw:
    """Zero-mean-curvature law k = -nu/(r^2 + h^2); k = 0 at mu = 0."""
    if pitch.is_infinite:
        return CurvatureLaw("minimal", lambda tau, nu: 0.0 * tau * nu, pitch=pitch)
    h2 = pitch.h * pitch.h

    def k_of(tau, nu):
        return -nu / (tau * tau + nu * nu + h2)

    return CurvatureLaw("minimal", k_of, pitch=pitch, params={"h": pitch.h})


def minimal_h0_law(min_radius: float = 1e-6) -> CurvatureLaw:
    """The singular h = 0 limit k = -nu/r^2, guarded away from the origin."""

    def k_of(tau, nu):
        return -nu / (tau * tau + nu * nu)

    return CurvatureLaw("minimal-h0", k_of, pitch=None, min_radius=min_radius)


@dataclass(frozen=True)
class MinimalCurveSpec:
    """Family parameters of one minimal generating curve.

    |A| is the distance of the curve to the origin; A = 0 gives a straight
    line through the origin and the swept surface is the helicoid.
    """

    pitch: Pitch
    A: float
    theta0: float = 0.0

    def __post_init__(self):
        if self.pitch.is_infinite:
            raise ValueError("the closed form needs finite pitch; mu = 0 curves are lines")


def _states_from_tau(spec: MinimalCurveSpec, tau: np.ndarray):
    h, A = spec.pitch.h, spec.A
    root = np.sqrt(tau * tau + h * h)
    nu = (A / h) * root
    theta = spec.theta0 - (A / h) * np.arcsinh(tau / h)
    s = (A * A + h * h) / (h * h) * tau
    k = -nu / (tau * tau + nu * nu + h * h)
    return s, nu, theta, k


def minimal_closed_form(
    spec: MinimalCurveSpec, tau_range: tuple[float, float] = (-10.0, 10.0), n_samples: int = 801
) -> GeneratingCurve:
    """Evaluate the closed-form minimal curve on a uniform tau grid.

    The grid is uniform in arc length as well, since s is linear in tau.
    """
    tau = np.linspace(tau_range[0], tau_range[1], n_samples)
    s, nu, theta, k = _states_from_tau(spec, tau)
    return GeneratingCurve(
        s=s,
        tau=tau,
        nu=nu,
        theta=theta,
        k=k,
        pitch=spec.pitch,
        law=minimal_law(spec.pitch),
    )


def minimal_closed_form_at(spec: MinimalCurveSpec, s: np.ndarray) -> GeneratingCurve:
    """The closed-form curve evaluated at prescribed arc lengths."""
    s = np.asarray(s, dtype=float)
    h, A = spec.pitch.h, spec.A
    tau = h * h / (A * A + h * h) * s
    _, nu, theta, k = _states_from_tau(spec, tau)
    return GeneratingCurve(
        s=s.copy(),
        tau=tau,
        nu=nu,
        theta=theta,
        k=k,
        pitch=spec.pitch,
        law=minimal_law(spec.pitch),
    )


def wunderlich_parametrization(
    spec: MinimalCurveSpec, u_range: tuple[float, float] = (-3.0, 3.0), n_samples: int = 801
) -> GeneratingCurve:
    """The same curve through the substitution u = arsinh(tau/h)/h,

        X = (h sinh(hu) + i A cosh(hu)) e^{-i A u + i theta0},

    sampled uniformly in u (so non-uniformly in arc length).
    """
    h, A = spec.pitch.h, spec.A
    u = np.linspace(u_range[0], u_range[1], n_samples)
    tau = h * np.sinh(h * u)
    nu = A * np.cosh(h * u)
    theta = spec.theta0 - A * u
    s = (A * A + h * h) / h * np.sinh(h * u)
    k = -nu / (tau * tau + nu * nu + h * h)
    return GeneratingCurve(
        s=s,
        tau=tau,
        nu=nu,
        theta=theta,
        k=k,
        pitch=spec.pitch,
        law=minimal_law(spec.pitch),
    )


def minimal_h0_curve(
    a: float, s_range: tuple[float, float] = (0.1, 10.0), n_samples: int = 801
) -> GeneratingCurve:
    """The h = 0 limit curve X = s^{1-ia}/(1-ia) on s > 0.

    Support functions: tau = s/(a^2+1), nu = a s/(a^2+1), theta = -a log s,
    k = -a/s; the growing angle rT/X = (1-ia)/sqrt(1+a^2) is constant.
    """
    if s_range[0] <= 0.0 or s_range[1] <= 0.0:
        raise ValueError("the h = 0 curve lives on s > 0")
    s = np.linspace(s_range[0], s_range[1], n_samples)
    denom = a * a + 1.0
    tau = s / denom
    nu = a * s / denom
    theta = -a * np.log(s)
    k = -a / s
    return GeneratingCurve(
        s=s,
        tau=tau,
        nu=nu,
        theta=theta,
        k=k,
        pitch=None,
        law=minimal_h0_law(),
    )


def minimal_limit_family(
    h: float, a: float, s_range: tuple[float, float], n_samples: int = 801
) -> GeneratingCurve:
    """The minimal curve with A = a h and phase a log(2/(h(a^2+1))).

    As h -> 0 it converges to ``minimal_h0_curve(a)`` uniformly on compact
    subsets of (0, infinity):

        X = (s + i a sqrt(s^2 + h^2 (a^2+1)^2))/(a^2+1)
            e^{-i a log((s + sqrt(s^2 + h^2 (a^2+1)^2))/2)}.
    """
    if h <= 0.0:
        raise ValueError("h must be positive")
    spec = MinimalCurveSpec(
        pitch=Pitch.finite(h), A=a * h, theta0=a * math.log(2.0 / (h * (a * a + 1.0)))
    )
    # s = (A^2 + h^2) tau / h^2 = (a^2 + 1) tau
    tau_range = (s_range[0] / (a * a + 1.0), s_range[1] / (a * a + 1.0))
    curve = minimal_closed_form(spec, tau_range, n_samples)
    return curve


def limit_family_points(h: float, a: float, s: np.ndarray) -> np.ndarray:
    """Direct evaluation of the limit-family formula, as (n, 2) points."""
    s = np.asarray(s, dtype=float)
    denom = a * a + 1.0
    root = np.sqrt(s * s + h * h * denom * denom)
    mod_re = s / denom
    mod_im = a * root / denom
    ang = -a * np.log((s + root) / 2.0)
    c, sn = np.cos(ang), np.sin(ang)
    return np.stack([mod_re * c - mod_im * sn, mod_re * sn + mod_im * c], axis=-1)
