"""Helicoidal surfaces rotating with unit speed under the flow.

The generating curves obey

    k = (tau (tau^2 + h^2) - nu) / (r^2 + h^2),

equivalently the sweep satisfies -H = h tau / sqrt(tau^2 + h^2), the normal
speed of a unit-speed rotation about the axis.  The family is parametrized
by the starting distance A to the origin, with initial data
(tau, nu)(0) = (0, A) and theta0 = 0; negative A is redundant by the
(tau, nu) -> (-tau, -nu) symmetry of the system and is normalized away.

Each curve has a unique point closest to the origin and two arms spiraling
out to infinity with curvature decaying to zero.  ``verify_soliton_structure``
checks all of that on a finite window with configurable thresholds, and
``convergence_experiment`` measures the h -> 0 collapse onto the circle of
radius |A|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .engine import (
    InitialData,
    IntegratorConfig,
    detect_events,
    integrate_curve,
    ode_residual,
)
from .geometry import CurvatureLaw, GeneratingCurve, Pitch

__all__ = [
    "rotating_law",
    "rotating_h0_law",
    "generate_rotating_curve",
    "SolitonThresholds",
    "SolitonReport",
    "verify_soliton_structure",
    "H0Trajectory",
    "h0_trajectory",
    "h0_rhs",
    "ConvergenceTable",
    "convergence_experiment",
    "polyline_self_intersects",
    "CurveTooShort",
]


class CurveTooShort(Exception):
    """The structure verifier needs |s| >= 20 on both arms."""


def rotating_law(pitch: Pitch) -> CurvatureLaw:
    """Curvature law of the unit-speed rotating soliton; k = tau at mu = 0."""
    if pitch.is_infinite:
        return CurvatureLaw("rotating", lambda tau, nu: tau + 0.0 * nu, pitch=pitch)
    h = pitch.h
    h2 = h * h

    def k_of(tau, nu):
        return (tau * (tau * tau + h2) - nu) / (tau * tau + nu * nu + h2)

    return CurvatureLaw("rotating", k_of, pitch=pitch, params={"h": h})


def rotating_h0_law(min_radius: float = 1e-6) -> CurvatureLaw:
    """The singular h = 0 limit k = (tau^3 - nu) / r^2.

    Curvature blows up at the origin, so the law carries a domain guard;
    trajectories that reach r = min_radius end with a DomainExit.
    """

    def k_of(tau, nu):
        return (tau**3 - nu) / (tau * tau + nu * nu)

    return CurvatureLaw("rotating-h0", k_of, pitch=None, min_radius=min_radius)


def generate_rotating_curve(
    pitch: Pitch,
    start_distance: float,
    arc_length: float,
    config: IntegratorConfig | None = None,
) -> GeneratingCurve:
    """Rotating-soliton generating curve over s in [-L, L].

    ``start_distance`` is the |A| of the initial data (0, A); its sign is
    normalized away.
    """
    A = abs(start_distance)
    cfg = replace(config or IntegratorConfig(), s_min=-arc_length, s_max=arc_length)
    return integrate_curve(rotating_law(pitch), InitialData((0.0, A), 0.0), cfg)


@dataclass(frozen=True)
class SolitonThresholds:
    """Finite-window proxies for the family's limit statements.

    Defaults are loose enough to hold for h in [0.25, 5] at |s| = 50; the
    report always carries the raw values so callers can tighten them.
    """

    nu_end: float = 10.0
    k_end: float = 0.05
    angle_defect: float = 0.1
    theta_growth: float = 4.0 * math.pi


@dataclass
class SolitonReport:
    """Qualitative-structure audit of one rotating generating curve."""

    tau_zero_count: int
    k_zero_count: int
    r_min_s: float
    r_min_value: float
    r_extremum_count: int
    nu_ends: tuple[float, float]  # (at s_min, at s_max)
    tau_ends: tuple[float, float]
    k_ends: tuple[float, float]
    angle_defects: tuple[float, float]  # |rT/X + i| at s_min, |rT/X - i| at s_max
    theta_growth: tuple[float, float]  # theta(s_min) - theta(0), theta(s_max) - theta(0)
    max_residual: float
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def verify_soliton_structure(
    curve: GeneratingCurve, thresholds: SolitonThresholds | None = None
) -> SolitonReport:
    """Check the qualitative structure of a rotating generating curve.

    Verifies: exactly one tau zero and one k zero (negative before, positive
    after), a unique r extremum which is the global minimum, |nu| growing
    past the threshold at the window ends with nu -> -inf on the right arm,
    |k| decayed below threshold with k > 0 on the right and k < 0 on the
    left, the limiting angle between location and tangent (rT/X -> +-i), and
    tangent-angle growth beyond the threshold along both arms.
    """
    thr = thresholds or SolitonThresholds()
    if curve.law is None or curve.law.name != "rotating":
        raise ValueError("verify_soliton_structure expects a rotating-law curve")
    s_lo, s_hi = float(curve.s[0]), float(curve.s[-1])
    if s_lo > -20.0 or s_hi < 20.0:
        raise CurveTooShort(f"window [{s_lo}, {s_hi}] is shorter than |s| = 20")

    law = curve.law
    tau_zeros = detect_events(curve, lambda s, y: y[0])
    k_zeros = detect_events(curve, lambda s, y: law.fn(y[0], y[1]))

    # dr^2/ds = 2 tau, so r extrema coincide with tau zeros; classify by tau'
    r_extrema = tau_zeros
    r_min_s = float("nan")
    r_min_value = float("inf")
    for s_star, y in tau_zeros:
        r_here = math.hypot(y[0], y[1])
        if r_here < r_min_value:
            r_min_value = r_here
            r_min_s = s_star

    sol = curve.solution
    y_lo, y_hi = sol(s_lo), sol(s_hi)
    y_0 = sol(0.0)

    def angle_defect(y, sign):
        # rT/X = (tau - i nu)/r; compare with sign * i
        r = math.hypot(y[0], y[1])
        return math.hypot(y[0] / r, -y[1] / r - sign)

    k_lo = float(law.fn(y_lo[0], y_lo[1]))
    k_hi = float(law.fn(y_hi[0], y_hi[1]))
    report = SolitonReport(
        tau_zero_count=len(tau_zeros),
        k_zero_count=len(k_zeros),
        r_min_s=r_min_s,
        r_min_value=r_min_value,
        r_extremum_count=len(r_extrema),
        nu_ends=(float(y_lo[1]), float(y_hi[1])),
        tau_ends=(float(y_lo[0]), float(y_hi[0])),
        k_ends=(k_lo, k_hi),
        angle_defects=(angle_defect(y_lo, -1.0), angle_defect(y_hi, +1.0)),
        theta_growth=(float(y_lo[2] - y_0[2]), float(y_hi[2] - y_0[2])),
        max_residual=ode_residual(curve),
    )
    report.checks = {
        "one_tau_zero": report.tau_zero_count == 1,
        "one_k_zero": report.k_zero_count == 1,
        "unique_r_minimum": report.r_extremum_count == 1 and math.isfinite(r_min_s),
        "nu_escapes": report.nu_ends[0] > thr.nu_end and report.nu_ends[1] < -thr.nu_end,
        "k_decays_with_signs": (
            abs(k_lo) < thr.k_end and abs(k_hi) < thr.k_end and k_lo < 0.0 < k_hi
        ),
        "angle_defects_small": max(report.angle_defects) < thr.angle_defect,
        "theta_grows_both_arms": min(report.theta_growth) > thr.theta_growth,
    }
    return report


def h0_rhs(tau: float, nu: float) -> tuple[float, float]:
    """Right-hand side of the h = 0 phase-plane system.

    Every point of the nu-axis except the origin is an equilibrium.
    """
    r2 = tau * tau + nu * nu
    if r2 == 0.0:
        raise ZeroDivisionError("the h = 0 system is singular at the origin")
    return (tau * tau * (1.0 + tau * nu) / r2, (tau * nu - tau**4) / r2)


@dataclass
class H0Trajectory:
    """One branch of the algebraic trajectory tau^3 + tau nu^2 + 2 nu = 2 a tau."""

    a: float
    tau: np.ndarray
    nu: np.ndarray

    def cubic_residual(self) -> float:
        t, n = self.tau, self.nu
        return float(np.max(np.abs(t**3 + t * n**2 + 2.0 * n - 2.0 * self.a * t)))


def h0_trajectory(a: float, n_steps: int = 400, ds: float = 0.01) -> H0Trajectory:
    """Sample the h = 0 trajectory through the origin by continuation.

    Predictor-corrector continuation of F(tau, nu) = tau^3 + tau nu^2 + 2 nu
    - 2 a tau = 0, started at the origin where the branch has slope a, and
    walked symmetrically in both directions.
    """

    def F(t, n):
        return t**3 + t * n * n + 2.0 * n - 2.0 * a * t

    def grad(t, n):
        return (3.0 * t * t + n * n - 2.0 * a, 2.0 * t * n + 2.0)

    def walk(direction: float) -> list[tuple[float, float]]:
        pts = []
        t, n = 0.0, 0.0
        prev = None
        for _ in range(n_steps):
            gt, gn = grad(t, n)
            norm = math.hypot(gt, gn)
            if norm < 1e-14:
                break
            # tangent of the level set; keep orientation consistent through folds
            ut, un = gn / norm, -gt / norm
            if prev is None:
                if direction < 0.0:
                    ut, un = -ut, -un
            elif ut * prev[0] + un * prev[1] < 0.0:
                ut, un = -ut, -un
            prev = (ut, un)
            tp, np_ = t + ds * ut, n + ds * un
            for _ in range(12):
                val = F(tp, np_)
                gt2, gn2 = grad(tp, np_)
                g2 = gt2 * gt2 + gn2 * gn2
                if g2 < 1e-30 or abs(val) < 1e-13:
                    break
                tp -= val * gt2 / g2
                np_ -= val * gn2 / g2
            t, n = tp, np_
            pts.append((t, n))
        return pts

    left = walk(-1.0)
    right = walk(+1.0)
    pts = list(reversed(left)) + [(0.0, 0.0)] + right
    arr = np.array(pts)
    return H0Trajectory(a=a, tau=arr[:, 0], nu=arr[:, 1])


@dataclass
class ConvergenceTable:
    """Distances of the h > 0 solutions to the constant solution (0, A)."""

    A: float
    interval: tuple[float, float]
    h_values: list[float]
    distances: list[list[float]]  # per h: [C0, C1, ...] sup-distances
    slope: float  # fitted slope of log(C0 distance) vs log(h)

    def c0(self) -> list[float]:
        return [d[0] for d in self.distances]


def _law_partials(h: float, tau: float, nu: float) -> tuple[float, float, float]:
    """(Phi, dPhi/dtau, dPhi/dnu) of the rotating law at finite h."""
    h2 = h * h
    D = tau * tau + nu * nu + h2
    num = tau * (tau * tau + h2) - nu
    phi = num / D
    phi_t = ((3.0 * tau * tau + h2) * D - num * 2.0 * tau) / (D * D)
    phi_n = (-D - num * 2.0 * nu) / (D * D)
    return phi, phi_t, phi_n


def _derivative_sup(h: float, tau: np.ndarray, nu: np.ndarray, order: int) -> float:
    """sup |d^order/ds^order (tau_h, nu_h)| along the samples.

    The limit solution is constant, so its derivatives vanish and the
    distance is just the sup of the derivative itself.  First derivatives
    come straight from the system; second derivatives via the chain rule
    with the analytic partials of the law.
    """
    vals = []
    for t, n in zip(tau, nu):
        phi, phi_t, phi_n = _law_partials(h, float(t), float(n))
        F0 = 1.0 + n * phi
        G0 = -t * phi
        if order == 1:
            vals.append(math.hypot(F0, G0))
        else:
            F0_t = n * phi_t
            F0_n = phi + n * phi_n
            G0_t = -phi - t * phi_t
            G0_n = -t * phi_n
            F1 = F0_t * F0 + F0_n * G0
            G1 = G0_t * F0 + G0_n * G0
            vals.append(math.hypot(F1, G1))
    return max(vals)


def convergence_experiment(
    A: float,
    h_values: list[float],
    interval: tuple[float, float] = (-5.0, 5.0),
    deriv_order: int = 1,
    config: IntegratorConfig | None = None,
    n_grid: int = 2001,
) -> ConvergenceTable:
    """Measure the h -> 0 convergence of (tau_h, nu_h) to the constant (0, A).

    For each h the rotating system is integrated from (0, A) over the
    interval, and sup-distances to the constant solution are recorded for
    the value and the first ``deriv_order`` derivatives (at most 2).  The
    fitted log-log slope of the value distance against h quantifies the
    linear-in-h bound.
    """
    if A == 0.0:
        raise ValueError("the convergence statement requires A != 0")
    if deriv_order > 2:
        raise ValueError("derivative distances supported up to order 2")
    hs = sorted(set(float(h) for h in h_values), reverse=True)
    if any(h <= 0.0 for h in hs):
        raise ValueError("all pitches must be positive")
    cfg = replace(config or IntegratorConfig(), s_min=interval[0], s_max=interval[1])
    grid = np.linspace(interval[0], interval[1], n_grid)
    distances = []
    for h in hs:
        law = rotating_law(Pitch.finite(h))
        curve = integrate_curve(law, InitialData((0.0, abs(A)), 0.0), cfg)
        ys = curve.solution(grid)
        tau, nu = ys[:, 0], ys[:, 1]
        row = [float(np.max(np.hypot(tau, nu - abs(A))))]
        for order in range(1, deriv_order + 1):
            row.append(_derivative_sup(h, tau, nu, order))
        distances.append(row)
    logs_h = np.log([h for h in hs])
    logs_d = np.log([row[0] for row in distances])
    slope = float(np.polyfit(logs_h, logs_d, 1)[0])
    return ConvergenceTable(
        A=abs(A), interval=interval, h_values=hs, distances=distances, slope=slope
    )


def limit_circle(A: float, s: np.ndarray, theta0: float = 0.0) -> np.ndarray:
    """The h -> 0 limit circle i A e^{-i s / A + i theta0}, as (n, 2) points."""
    ang = theta0 - s / A
    return np.stack([-A * np.sin(ang), A * np.cos(ang)], axis=-1)


def polyline_self_intersects(points: np.ndarray, skip_adjacent: int = 1) -> bool:
    """Detect a proper self-intersection of a sampled polyline.

    Segment pairs are pruned with a uniform spatial hash whose cell size is
    the largest segment length; neighbouring segments along the curve are
    exempt.
    """
    pts = np.asarray(points, dtype=float)
    n_seg = len(pts) - 1
    if n_seg < 3:
        return False
    seg_lo = np.minimum(pts[:-1], pts[1:])
    seg_hi = np.maximum(pts[:-1], pts[1:])
    cell = float(np.max(seg_hi - seg_lo))
    if cell <= 0.0:
        return False
    buckets: dict[tuple[int, int], list[int]] = {}
    for i in range(n_seg):
        x0, y0 = seg_lo[i] / cell
        x1, y1 = seg_hi[i] / cell
        for cx in range(int(math.floor(x0)), int(math.floor(x1)) + 1):
            for cy in range(int(math.floor(y0)), int(math.floor(y1)) + 1):
                buckets.setdefault((cx, cy), []).append(i)
    seen: set[tuple[int, int]] = set()
    for members in buckets.values():
        for ii in range(len(members)):
            for jj in range(ii + 1, len(members)):
                i, j = members[ii], members[jj]
                if abs(i - j) <= skip_adjacent:
                    continue
                if (i, j) in seen:
                    continue
                seen.add((i, j))
                if _segments_cross(pts[i], pts[i + 1], pts[j], pts[j + 1]):
                    return True
    return False


def _segments_cross(p1, p2, p3, p4) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(p3, p4, p1)
    d2 = orient(p3, p4, p2)
    d3 = orient(p1, p2, p3)
    d4 = orient(p1, p2, p4)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))
