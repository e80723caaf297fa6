"""Self-similar motions under the flow and their surface residuals.

A motion F(p, t) = g(t) Q(t) F(p) + v(t) is the mean curvature flow of a
surface exactly when, at t = 0,

    b <F, n> + <A F, n> + <c, n> = -H,      b = g'(0), A = Q'(0), c = v'(0),

with A skew.  Solving the compatibility conditions gives the two solved
profiles: dilation + rotation with g = sqrt(2bt+1) and
Q = exp(log(2bt+1)/(2b) A), and translation + rotation with Q = exp(tA),
v = tc under A c = 0.  The general triple reduces to one of these by a
translation w: the unique solution of (A + bI) w = c when b != 0, or any w
with c = A w + c0, A c0 = 0 when b = 0 (chosen minimal-norm here; the
kernel component of w is free and residuals are invariant to it).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import GeneratingCurve, reconstruct_points

__all__ = [
    "MotionSpec",
    "MotionProfile",
    "NonSkew",
    "OrthogonalityViolated",
    "matrix_exp_skew",
    "dilation_rotation_profile",
    "translation_rotation_profile",
    "reduce_general",
    "soliton_residual",
    "sample_helicoidal_surface",
    "z_rotation_generator",
]


class NonSkew(ValueError):
    """The rotation generator must be skew-symmetric."""


class OrthogonalityViolated(ValueError):
    """Translation + rotation requires A c = 0."""


def _check_skew(A: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NonSkew(f"expected a square matrix, got shape {A.shape}")
    scale = max(1.0, float(np.max(np.abs(A))))
    if float(np.max(np.abs(A + A.T))) > tol * scale:
        raise NonSkew("matrix is not skew-symmetric")
    return A


def z_rotation_generator() -> np.ndarray:
    """Generator of unit-speed rotation about the z-axis."""
    return np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])


def matrix_exp_skew(A: np.ndarray, t: float = 1.0) -> np.ndarray:
    """exp(tA) for skew A: Rodrigues in 3D, scaling-and-squaring otherwise."""
    A = _check_skew(A)
    n = A.shape[0]
    if n == 3:
        w = np.array([A[2, 1], A[0, 2], A[1, 0]])
        angle = t * float(np.linalg.norm(w))
        if angle == 0.0:
            return np.eye(3)
        K = A * (t / angle)
        return np.eye(3) + math.sin(angle) * K + (1.0 - math.cos(angle)) * (K @ K)
    B = t * A
    norm = float(np.max(np.sum(np.abs(B), axis=1)))
    squarings = max(0, int(math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0)
    B = B / (2.0**squarings)
    term = np.eye(n)
    result = np.eye(n)
    for k in range(1, 14):
        term = term @ B / k
        result = result + term
    for _ in range(squarings):
        result = result @ result
    return result


@dataclass
class MotionProfile:
    """Evaluable (g, Q, v) with validity interval and the solved spec."""

    g: Callable[[float], float]
    Q: Callable[[float], np.ndarray]
    v: Callable[[float], np.ndarray]
    interval: tuple[float, float]
    b: float
    A: np.ndarray
    c: np.ndarray

    def angle_scale(self, t: float) -> float:
        """Accumulated rotation parameter: log(2bt+1)/(2b), or t when b = 0."""
        if self.b == 0.0:
            return t
        return math.log(2.0 * self.b * t + 1.0) / (2.0 * self.b)

    def contains(self, t: float) -> bool:
        return self.interval[0] < t < self.interval[1]


def dilation_rotation_profile(b: float, A: np.ndarray) -> MotionProfile:
    """Motion with g = sqrt(2bt+1) and Q = exp(angle_scale(t) A), v = 0.

    Valid while 2bt + 1 > 0: the surface shrinks toward the singular time
    -1/(2b) when b < 0 and expands forever when b > 0.
    """
    A = _check_skew(A)
    n = A.shape[0]
    if b > 0.0:
        interval = (-1.0 / (2.0 * b), math.inf)
    elif b < 0.0:
        interval = (-math.inf, -1.0 / (2.0 * b))
    else:
        interval = (-math.inf, math.inf)

    def g(t: float) -> float:
        return math.sqrt(2.0 * b * t + 1.0)

    def Q(t: float) -> np.ndarray:
        scale = t if b == 0.0 else math.log(2.0 * b * t + 1.0) / (2.0 * b)
        return matrix_exp_skew(A, scale)

    def v(t: float) -> np.ndarray:
        return np.zeros(n)

    return MotionProfile(g=g, Q=Q, v=v, interval=interval, b=b, A=A, c=np.zeros(n))


def translation_rotation_profile(A: np.ndarray, c: np.ndarray) -> MotionProfile:
    """Motion with Q = exp(tA) and v = tc; requires the directions orthogonal,
    A c = 0."""
    A = _check_skew(A)
    c = np.asarray(c, dtype=float)
    cn = float(np.linalg.norm(c))
    if cn > 0.0 and float(np.linalg.norm(A @ c)) > 1e-12 * cn:
        raise OrthogonalityViolated("A c != 0: translation not aligned with the rotation axis")

    def g(t: float) -> float:
        return 1.0

    def Q(t: float) -> np.ndarray:
        return matrix_exp_skew(A, t)

    def v(t: float) -> np.ndarray:
        return t * c

    return MotionProfile(g=g, Q=Q, v=v, interval=(-math.inf, math.inf), b=0.0, A=A, c=c)


@dataclass(frozen=True)
class MotionSpec:
    """The triple (b, A, c) of the soliton equation."""

    b: float
    A: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        _check_skew(self.A)

    def profile(self) -> MotionProfile:
        if self.b != 0.0:
            if float(np.linalg.norm(self.c)) > 0.0:
                raise ValueError("reduce the translation term first (reduce_general)")
            return dilation_rotation_profile(self.b, self.A)
        if float(np.linalg.norm(self.c)) == 0.0:
            return dilation_rotation_profile(0.0, self.A)
        return translation_rotation_profile(self.A, self.c)


def reduce_general(b: float, A: np.ndarray, c: np.ndarray) -> tuple[np.ndarray, MotionSpec]:
    """Absorb the translation term by moving the surface by a vector w.

    b != 0: w solves (A + bI) w = c (unique, since skew A has no nonzero
    real eigenvalues), leaving a pure dilation + rotation about w.
    b = 0: split c = A w + c0 with A c0 = 0 using ker(A) = im(A)^perp; w is
    the minimal-norm preimage, its kernel component being free.
    """
    A = _check_skew(A)
    c = np.asarray(c, dtype=float)
    n = A.shape[0]
    if b != 0.0:
        w = np.linalg.solve(A + b * np.eye(n), c)
        return w, MotionSpec(b=b, A=A, c=np.zeros(n))
    w = np.linalg.pinv(A) @ c
    c0 = c - A @ w
    return w, MotionSpec(b=0.0, A=A, c=c0)


def soliton_residual(samples, spec: MotionSpec) -> float:
    """sup over samples of |b <F, n> + <A F, n> + <c, n> + H|.

    ``samples`` is (F, n, H) with F, n of shape (m, 3) and H of shape (m,).
    """
    F, nrm, H = samples
    F = np.asarray(F, dtype=float)
    nrm = np.asarray(nrm, dtype=float)
    H = np.asarray(H, dtype=float)
    lin = spec.b * np.einsum("ij,ij->i", F, nrm)
    rot = np.einsum("ij,ij->i", F @ spec.A.T, nrm)
    trans = nrm @ np.asarray(spec.c, dtype=float)
    return float(np.max(np.abs(lin + rot + trans + H)))


def sample_helicoidal_surface(
    curve: GeneratingCurve, t_values=None, translate_by: np.ndarray | None = None
):
    """(F, n, H) samples of the helicoidal sweep of a generating curve.

    Every curve sample is swept through the given angles t (default: eight
    angles over one turn).  ``translate_by`` shifts the surface, for
    residual-invariance checks of the reduction.
    """
    if curve.pitch is None or curve.pitch.is_infinite:
        raise ValueError("surface sampling requires finite pitch")
    h = curve.pitch.h
    if t_values is None:
        t_values = np.linspace(0.0, 2.0 * math.pi, 8, endpoint=False)
    t_values = np.asarray(t_values, dtype=float)

    X = reconstruct_points(curve.tau, curve.nu, curve.theta)
    Nx, Ny = -np.sin(curve.theta), np.cos(curve.theta)
    scale = 1.0 / np.sqrt(curve.tau**2 + h * h)
    H = curve.mean_curvatures()

    Fs, ns, Hs = [], [], []
    for t in t_values:
        ct, st = math.cos(t), math.sin(t)
        Fx = X[:, 0] * ct - X[:, 1] * st
        Fy = X[:, 0] * st + X[:, 1] * ct
        Fz = np.full_like(Fx, h * t)
        nx = (Nx * ct - Ny * st) * h * scale
        ny = (Nx * st + Ny * ct) * h * scale
        nz = -curve.tau * scale
        Fs.append(np.stack([Fx, Fy, Fz], axis=-1))
        ns.append(np.stack([nx, ny, nz], axis=-1))
        Hs.append(H)
    F = np.concatenate(Fs)
    nrm = np.concatenate(ns)
    Hh = np.concatenate(Hs)
    if translate_by is not None:
        F = F + np.asarray(translate_by, dtype=float)
    return F, nrm, Hh
