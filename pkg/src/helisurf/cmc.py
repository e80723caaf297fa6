"""Constant-mean-curvature helicoidal surfaces and their closed curves.

After rescaling, H = -1 with respect to the inward normal, and the
generating curves obey

    k = (tau^2 + h^2)^{3/2} / (h (r^2 + h^2)) - nu / (r^2 + h^2).

The norm-preserving involution

    Phi_h(x1, x2) = (sqrt(r^2+h^2)/sqrt(x2^2+h^2) x2, h x1 / sqrt(x2^2+h^2))

turns the phase plane into coordinates (x, y) = Phi_h(nu, tau) in which the
trajectories are circles x^2 + (y+1)^2 = R^2; in the circle's phase u the
trajectory is (R cos u, -1 - R sin u) and ds/du = sqrt(y^2+h^2)/h.  One
excursion (period) runs u over 2 pi, touching the annulus radii |R-1| and
R+1 once each.

The tangent-angle advance over an excursion,

    dtheta(R, h) = int_{-pi}^{pi} [ h sqrt(R^2+1+2R sin u + h^2) /
                   ((1+R sin u)^2 + h^2)
                   + (1+R sin u) / (h sqrt(R^2+1+2R sin u+h^2)) ] du,

decreases strictly from 2 pi sqrt(h^2+1)/h at R = 0 to 2 pi as R -> inf,
so dtheta(R) = 2 pi p/q has a unique root for every admissible ratio
1 < p/q < sqrt(h^2+1)/h; q excursions then close the curve with rotation
number p.  The position-angle advance dphi differs from dtheta by 0, pi or
2 pi according to R < 1, R = 1, R > 1, and the critical ratio

    alpha_h = sqrt(h^2+4)/(h pi) E(2/sqrt(h^2+4)) + 1/2 = dtheta(1, h)/(2 pi)

separates winding number p (ratio above alpha_h) from p - q (below).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .engine import IntegratorConfig, Solution, integrate_ode
from .geometry import CurvatureLaw, GeneratingCurve, Pitch, reconstruct_points
from .quadrature import gauss_kronrod

__all__ = [
    "cmc_law",
    "involution_phi",
    "elliptic_E",
    "delta_theta",
    "delta_phi",
    "alpha",
    "find_R",
    "excursion_period",
    "CmcTrajectory",
    "generate_cmc_curve",
    "ClassificationReport",
    "classify_closed",
    "RatioOutOfRange",
    "BracketFailure",
    "NearOriginAmbiguity",
]


class RatioOutOfRange(ValueError):
    """p/q outside the open admissibility interval (1, sqrt(h^2+1)/h)."""


class BracketFailure(RuntimeError):
    """The root bracket could not be established (diagnostic only)."""


class NearOriginAmbiguity(Warning):
    """p/q is numerically at alpha_h; the winding number is ill-conditioned."""


def cmc_law(pitch: Pitch, H: float = -1.0) -> CurvatureLaw:
    """Curvature law of constant mean curvature H (default -1); k = -H at mu = 0."""
    if H == 0.0:
        raise ValueError("H must be nonzero; use the minimal law for H = 0")
    if pitch.is_infinite:
        return CurvatureLaw("cmc", lambda tau, nu: -H + 0.0 * tau * nu, pitch=pitch)
    h = pitch.h

    def k_of(tau, nu):
        t2h2 = tau * tau + h * h
        r2h2 = tau * tau + nu * nu + h * h
        return -H * t2h2**1.5 / (h * r2h2) - nu / r2h2

    return CurvatureLaw("cmc", k_of, pitch=pitch, params={"h": h, "H": H})


def involution_phi(x1: float, x2: float, pitch: Pitch) -> tuple[float, float]:
    """The norm-preserving involution; the reflection (x2, x1) at mu = 0."""
    if pitch.is_infinite:
        return (x2, x1)
    h = pitch.h
    root = math.sqrt(x2 * x2 + h * h)
    r2 = x1 * x1 + x2 * x2
    return (math.sqrt(r2 + h * h) / root * x2, h * x1 / root)


def elliptic_E(k: float, tol: float = 1e-15) -> float:
    """Complete elliptic integral of the second kind by the AGM iteration."""
    if not 0.0 <= k <= 1.0:
        raise ValueError(f"modulus must lie in [0, 1], got {k}")
    if k == 1.0:
        return 1.0
    a, b = 1.0, math.sqrt(1.0 - k * k)
    pow2 = 0.5
    csum = pow2 * k * k
    for _ in range(64):
        c = 0.5 * (a - b)
        if abs(c) < tol:
            break
        pow2 *= 2.0
        csum += pow2 * c * c
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    K = math.pi / (2.0 * a)
    return K * (1.0 - csum)


def _dtheta_integrand(R: float, h: float):
    def f(u: float) -> float:
        one_plus = 1.0 + R * math.sin(u)
        r2h2 = R * R + 1.0 + 2.0 * R * math.sin(u) + h * h
        root = math.sqrt(r2h2)
        return h * root / (one_plus * one_plus + h * h) + one_plus / (h * root)

    return f


def delta_theta(R: float, pitch: Pitch, tol: float = 1e-12) -> float:
    """Tangent-angle advance over one excursion; 2 pi exactly at mu = 0."""
    if R < 0.0:
        raise ValueError("R must be nonnegative")
    if pitch.is_infinite:
        return 2.0 * math.pi
    return gauss_kronrod(_dtheta_integrand(R, pitch.h), -math.pi, math.pi, tol=tol)


def delta_phi(R: float, pitch: Pitch, tol: float = 1e-12) -> float:
    """Position-angle advance over one excursion, derived from delta_theta.

    The (tau, nu) trajectory winds clockwise around the origin for R > 1 and
    passes through it at R = 1, which offsets dphi from dtheta by 2 pi and
    pi respectively.
    """
    dth = delta_theta(R, pitch, tol=tol)
    if R < 1.0:
        return dth
    if R == 1.0:
        return dth - math.pi
    return dth - 2.0 * math.pi


def alpha(pitch: Pitch) -> float:
    """Critical rotation ratio separating the two winding regimes; 1 at mu = 0."""
    if pitch.is_infinite:
        return 1.0
    h = pitch.h
    root = math.sqrt(h * h + 4.0)
    return root / (h * math.pi) * elliptic_E(2.0 / root) + 0.5


def admissible_ratio_bound(pitch: Pitch) -> float:
    """Upper bound sqrt(h^2+1)/h of admissible rotation ratios p/q."""
    if pitch.is_infinite:
        return 1.0
    h = pitch.h
    return math.sqrt(h * h + 1.0) / h


def find_R(p: int, q: int, pitch: Pitch, tol: float = 1e-10) -> float:
    """Solve delta_theta(R) = 2 pi p/q for the unique amplitude R.

    Bisection on the monotone-decreasing delta_theta, accelerated by secant
    steps whenever they stay inside the bracket.
    """
    if p <= 0 or q <= 0:
        raise ValueError("p and q must be positive integers")
    if math.gcd(p, q) != 1:
        raise ValueError(f"p and q must be coprime, got gcd = {math.gcd(p, q)}")
    ratio = p / q
    bound = admissible_ratio_bound(pitch)
    if not 1.0 < ratio < bound:
        raise RatioOutOfRange(
            f"p/q = {p}/{q} = {ratio:.6g} outside the admissible interval (1, {bound:.6g})"
        )
    target = 2.0 * math.pi * ratio
    quad_tol = min(1e-12, 0.01 * tol)

    def g(R: float) -> float:
        return delta_theta(R, pitch, tol=quad_tol) - target

    lo, g_lo = 0.0, g(0.0)
    hi, g_hi = 1.0, g(1.0)
    doublings = 0
    while g_hi > 0.0:
        lo, g_lo = hi, g_hi
        hi *= 2.0
        g_hi = g(hi)
        doublings += 1
        if doublings > 60:
            raise BracketFailure(f"no sign change up to R = {hi}")
    if g_lo <= 0.0 and lo > 0.0:
        raise BracketFailure("lower bracket end lost positivity")

    R_prev, g_prev = lo, g_lo
    R_cur, g_cur = hi, g_hi
    for _ in range(200):
        if abs(g_cur) < tol:
            return R_cur
        # secant proposal from the last two evaluations
        denom = g_cur - g_prev
        R_next = R_cur - g_cur * (R_cur - R_prev) / denom if denom != 0.0 else 0.5 * (lo + hi)
        if not lo < R_next < hi:
            R_next = 0.5 * (lo + hi)
        g_next = g(R_next)
        if g_next > 0.0:
            lo = R_next
        else:
            hi = R_next
        R_prev, g_prev = R_cur, g_cur
        R_cur, g_cur = R_next, g_next
        if hi - lo < 1e-15 * max(1.0, hi):
            return R_cur
    return R_cur


def excursion_period(R: float, pitch: Pitch, tol: float = 1e-12) -> float:
    """Arc length of one excursion, S = int sqrt(y^2+h^2)/h du over a period."""
    if R < 0.0:
        raise ValueError("R must be nonnegative")
    if pitch.is_infinite:
        raise ValueError("excursions need finite pitch")
    h = pitch.h

    def f(u: float) -> float:
        y = -1.0 - R * math.sin(u)
        return math.sqrt(y * y + h * h) / h

    return gauss_kronrod(f, -math.pi, math.pi, tol=tol)


@dataclass
class CmcTrajectory:
    """One CMC run: amplitude, period, and a dense first excursion."""

    R: float
    pitch: Pitch
    period: float
    s: np.ndarray  # one period of samples
    tau: np.ndarray
    nu: np.ndarray
    theta: np.ndarray
    start: tuple[float, float]
    excursion_ends: list[float]  # arc lengths of each completed excursion
    solution: Solution

    def circle_coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        """(x, y) = Phi_h(nu, tau) along the stored period."""
        h = self.pitch.h
        root = np.sqrt(self.tau**2 + h * h)
        r2 = self.tau**2 + self.nu**2
        x = np.sqrt(r2 + h * h) / root * self.tau
        y = h * self.nu / root
        return x, y


def _cmc_rhs(law: CurvatureLaw, h: float):
    def f(s, y):
        tau, nu = y[0], y[1]
        k = law.fn(tau, nu)
        ycoord = h * nu / math.sqrt(tau * tau + h * h)
        return np.array(
            [1.0 + nu * k, -tau * k, k, h / math.sqrt(ycoord * ycoord + h * h)]
        )

    return f


def generate_cmc_curve(
    R: float,
    pitch: Pitch,
    n_excursions: int = 1,
    theta0: float = 0.0,
    config: IntegratorConfig | None = None,
) -> tuple[GeneratingCurve, CmcTrajectory]:
    """Integrate the CMC curve from (tau, nu) = (0, -(1+R)) over whole excursions.

    The circle phase u is carried as a fourth state with u(0) = pi/2 (the
    outer annulus boundary); integration stops exactly when u has advanced
    by 2 pi per requested excursion.
    """
    if R < 0.0:
        raise ValueError("R must be nonnegative")
    if pitch.is_infinite:
        raise ValueError("generate_cmc_curve needs finite pitch")
    if n_excursions < 1:
        raise ValueError("n_excursions must be at least 1")
    h = pitch.h
    law = cmc_law(pitch)
    cfg = config or IntegratorConfig()
    u0 = 0.5 * math.pi
    u_end = u0 + 2.0 * math.pi * n_excursions
    y0 = np.array([0.0, -(1.0 + R), theta0, u0])
    # generous s cap; the terminal event fires first
    s_cap = 1.2 * n_excursions * excursion_period(R, pitch) + 1.0
    sol = integrate_ode(
        _cmc_rhs(law, h),
        0.0,
        y0,
        s_cap,
        config=cfg,
        terminal_event=lambda s, y: y[3] - u_end,
    )
    if sol.status != "event":
        raise RuntimeError("CMC integration missed the excursion-count event")

    # u is strictly increasing, so each excursion end is a single bisection
    # inside the unique step whose u-range brackets the target
    u_samples = sol.y[:, 3]
    ends = []
    for j in range(1, n_excursions + 1):
        target = u0 + 2.0 * math.pi * j
        if j == n_excursions:
            ends.append(float(sol.s[-1]))
            continue
        idx = int(np.searchsorted(u_samples, target))
        step = sol.steps[idx - 1]
        sa, sb = step.s0, step.s0 + step.h
        for _ in range(80):
            sm = 0.5 * (sa + sb)
            if step.eval(sm)[3] < target:
                sa = sm
            else:
                sb = sm
            if sb - sa < 1e-12:
                break
        ends.append(0.5 * (sa + sb))
    period = ends[0]

    curve = GeneratingCurve(
        s=sol.s.copy(),
        tau=sol.y[:, 0].copy(),
        nu=sol.y[:, 1].copy(),
        theta=sol.y[:, 2].copy(),
        k=np.asarray(law.fn(sol.y[:, 0], sol.y[:, 1]), dtype=float),
        pitch=pitch,
        law=law,
        abs_tol=cfg.abs_tol,
        rel_tol=cfg.rel_tol,
        solution=sol,
    )

    n_per = max(400, min(4000, int(period / 0.01) + 1))
    s_grid = np.linspace(0.0, period, n_per)
    ys = sol(s_grid)
    traj = CmcTrajectory(
        R=R,
        pitch=pitch,
        period=period,
        s=s_grid,
        tau=ys[:, 0],
        nu=ys[:, 1],
        theta=ys[:, 2],
        start=(0.0, -(1.0 + R)),
        excursion_ends=ends,
        solution=sol,
    )
    return curve, traj


@dataclass
class ClassificationReport:
    """Outcome of the closed-curve classification for one (h, p, q)."""

    h: float
    p: int
    q: int
    R: float
    delta_theta: float
    delta_phi: float
    alpha: float
    closure_error: float
    rotation_number: int
    rotation_residual: float
    winding_number: int | None
    through_origin: bool
    trichotomy: str  # "through-origin" | "winding p" | "winding p-q"
    min_radius: float
    symmetry_error: float | None
    theta0: float


def winding_number(points: np.ndarray, origin_tol: float = 1e-6) -> int | None:
    """Signed loop count of a closed polyline about the origin.

    Returns None when a vertex comes within ``origin_tol`` of the origin,
    where the count is ill-conditioned.
    """
    pts = np.asarray(points, dtype=float)
    r = np.hypot(pts[:, 0], pts[:, 1])
    if float(np.min(r)) < origin_tol:
        return None
    ang = np.arctan2(pts[:, 1], pts[:, 0])
    dif = np.diff(ang)
    dif = (dif + math.pi) % (2.0 * math.pi) - math.pi
    turns = float(np.sum(dif)) / (2.0 * math.pi)
    return int(round(turns))


def _hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    d = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2))
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def classify_closed(
    p: int,
    q: int,
    pitch: Pitch,
    theta0: float = 0.0,
    tol: float = 1e-10,
    config: IntegratorConfig | None = None,
) -> ClassificationReport:
    """Construct and audit the closed CMC curve with rotation number p and
    q-fold symmetry.

    Checks performed: closure after q excursions, rotation number from the
    total turning of theta, the winding number about the origin against the
    side of alpha_h (computed independently through the elliptic integral),
    and the q-fold symmetry by rotating the first excursion onto the second.
    """
    R = find_R(p, q, pitch, tol=tol)
    dth = delta_theta(R, pitch)
    dph = delta_phi(R, pitch)
    a_h = alpha(pitch)
    curve, traj = generate_cmc_curve(R, pitch, n_excursions=q, theta0=theta0, config=config)

    pts_ends = reconstruct_points(
        np.array([curve.tau[0], curve.tau[-1]]),
        np.array([curve.nu[0], curve.nu[-1]]),
        np.array([curve.theta[0], curve.theta[-1]]),
    )
    closure = float(np.hypot(*(pts_ends[1] - pts_ends[0])))

    turning = (float(curve.theta[-1]) - float(curve.theta[0])) / (2.0 * math.pi)
    rotation = int(round(turning))

    ratio = p / q
    near_alpha = abs(ratio - a_h) < 1e-9
    if near_alpha:
        warnings.warn(
            NearOriginAmbiguity(
                f"p/q = {p}/{q} sits at the critical ratio; winding is ill-conditioned"
            )
        )
    # sampling step fine enough to resolve the angle swing at closest approach
    r_inner = abs(R - 1.0)
    s_total = float(curve.s[-1])
    ds = min(0.05, 0.5 * r_inner) if r_inner > 1e-6 else 0.01
    n_pts = min(400_000, max(2000, int(s_total / ds) + 1))
    grid = np.linspace(0.0, s_total, n_pts)
    ys = curve.solution(grid)
    pts = reconstruct_points(ys[:, 0], ys[:, 1], ys[:, 2])
    min_radius = float(np.min(np.hypot(pts[:, 0], pts[:, 1])))

    if near_alpha or min_radius < 1e-6:
        wind = None
        through_origin = True
        tag = "through-origin"
    else:
        wind = winding_number(pts)
        through_origin = False
        tag = "winding p" if ratio > a_h else "winding p-q"

    symmetry_error = None
    if q >= 2 and len(traj.excursion_ends) >= 2:
        s1 = traj.excursion_ends[0]
        s2 = traj.excursion_ends[1]
        g1 = np.linspace(0.0, s1, 800)
        g2 = np.linspace(s1, s2, 800)
        y1 = curve.solution(g1)
        y2 = curve.solution(g2)
        p1 = reconstruct_points(y1[:, 0], y1[:, 1], y1[:, 2])
        p2 = reconstruct_points(y2[:, 0], y2[:, 1], y2[:, 2])
        c, s_ = math.cos(dth), math.sin(dth)
        p1_rot = np.stack(
            [p1[:, 0] * c - p1[:, 1] * s_, p1[:, 0] * s_ + p1[:, 1] * c], axis=-1
        )
        symmetry_error = _hausdorff(p1_rot, p2)

    return ClassificationReport(
        h=pitch.h,
        p=p,
        q=q,
        R=R,
        delta_theta=dth,
        delta_phi=dph,
        alpha=a_h,
        closure_error=closure,
        rotation_number=rotation,
        rotation_residual=abs(turning - rotation),
        winding_number=wind,
        through_origin=through_origin,
        trichotomy=tag,
        min_radius=min_radius,
        symmetry_error=symmetry_error,
        theta0=theta0,
    )
