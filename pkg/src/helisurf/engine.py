"""Adaptive arc-length integration of prescribed-curvature ODE systems.

The system for the support functions of a curve with curvature law
k = Phi(tau, nu) is

    tau' = 1 + nu Phi(tau, nu)
    nu'  = -tau Phi(tau, nu)
    theta' = Phi(tau, nu)

and since d/ds sqrt(tau^2 + nu^2) = tau / r <= 1 the solution exists for all
arc length, so the only termination causes are the configured window, a
terminal event, or the domain guard of a singular (h -> 0) law.

The integrator is an explicit embedded Runge-Kutta 5(4) pair with the
Dormand-Prince coefficients, PI step-size control and a quartic dense-output
interpolant stored per accepted step.  theta is integrated as a state
variable rather than recovered by post-hoc quadrature so that closure checks
see a phase consistent with (tau, nu).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .geometry import CurvatureLaw, GeneratingCurve

__all__ = [
    "InitialData",
    "IntegratorConfig",
    "DomainExit",
    "StepUnderflow",
    "Solution",
    "integrate_ode",
    "integrate_curve",
    "integrate_tau_nu",
    "detect_events",
    "conserved_drift",
    "resample_arclength",
    "ode_residual",
]

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
# b5 - b4: coefficients of the embedded error estimate
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)
# dense-output coefficients of the quartic interpolant
_D = (
    -12715105075 / 11282082432,
    0.0,
    87487479700 / 32700410799,
    -10690763975 / 1880347072,
    701980252875 / 199316789632,
    -1453857185 / 822651844,
    69997945 / 29380423,
)


class DomainExit(Exception):
    """A trajectory reached the excluded region of a singular law.

    Expected for the h -> 0 laws with a != 0.  Carries the integration up to
    the located boundary crossing.
    """

    def __init__(self, solution: "Solution"):
        self.solution = solution
        s, y = solution.s[-1], solution.y[-1]
        super().__init__(f"trajectory left the law's domain at s={s:.6g}, state={y}")


class StepUnderflow(Exception):
    """Adaptive step fell below the floor; diagnostic for non-smooth input."""


@dataclass(frozen=True)
class InitialData:
    """Starting point z0 in the plane and starting tangent angle theta0."""

    z0: tuple[float, float]
    theta0: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta0 < 2.0 * math.pi:
            raise ValueError(f"theta0 must lie in [0, 2*pi), got {self.theta0}")

    def support_values(self) -> tuple[float, float]:
        """(tau, nu)(0) = e^{-i theta0} z0."""
        x, y = self.z0
        c, s = math.cos(self.theta0), math.sin(self.theta0)
        return (x * c + y * s, -x * s + y * c)


@dataclass(frozen=True)
class IntegratorConfig:
    """Step control and window for one integration.

    Besides the embedded 5(4) error estimate, accepted steps must keep the
    dense interpolant's defect |P'(s) - f(P(s))| below
    ``defect_factor * abs_tol`` at interior control points, so the residual
    guarantee holds per step and not just on average.  ``defect_factor = 0``
    disables that check.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_step: float = math.inf
    s_min: float = -20.0
    s_max: float = 20.0
    max_steps: int = 1_000_000
    defect_factor: float = 10.0

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.s_min > self.s_max:
            raise ValueError("s_min must not exceed s_max")


@dataclass(frozen=True)
class _DenseStep:
    """Quartic interpolant over one accepted step [s0, s0 + h]."""

    s0: float
    h: float
    r1: np.ndarray
    r2: np.ndarray
    r3: np.ndarray
    r4: np.ndarray
    r5: np.ndarray

    def eval(self, s: float) -> np.ndarray:
        th = (s - self.s0) / self.h
        om = 1.0 - th
        return self.r1 + th * (self.r2 + om * (self.r3 + th * (self.r4 + om * self.r5)))

    def deriv(self, s: float) -> np.ndarray:
        th = (s - self.s0) / self.h
        p = (
            self.r2
            + (1.0 - 2.0 * th) * self.r3
            + th * (2.0 - 3.0 * th) * self.r4
            + 2.0 * th * (1.0 - th) * (1.0 - 2.0 * th) * self.r5
        )
        return p / self.h


@dataclass
class Solution:
    """Accepted-step samples plus dense output of one integration.

    ``status`` is "completed", "event" (terminal event located) or
    "domain_exit".  Steps are kept sorted by arc length so that two-sided
    integrations can be merged and evaluated uniformly.
    """

    s: np.ndarray
    y: np.ndarray
    steps: list[_DenseStep]
    status: str = "completed"

    @property
    def s_min(self) -> float:
        return float(self.s[0])

    @property
    def s_max(self) -> float:
        return float(self.s[-1])

    def _locate(self, sq: float) -> _DenseStep:
        lo, hi = 0, len(self.steps) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            step = self.steps[mid]
            right = max(step.s0, step.s0 + step.h)
            if sq <= right:
                hi = mid
            else:
                lo = mid + 1
        return self.steps[lo]

    def __call__(self, sq):
        eps = 1e-12 * max(1.0, abs(self.s_min), abs(self.s_max))
        if np.isscalar(sq):
            if sq < self.s_min - eps or sq > self.s_max + eps:
                raise ValueError(f"s={sq} outside [{self.s_min}, {self.s_max}]")
            return self._locate(float(sq)).eval(float(sq))
        sq = np.asarray(sq, dtype=float)
        return np.array([self(float(v)) for v in sq])

    def deriv(self, sq: float) -> np.ndarray:
        return self._locate(float(sq)).deriv(float(sq))

    def merged_with(self, other: "Solution") -> "Solution":
        """Join a backward and a forward run sharing the starting sample."""
        a, b = (self, other) if self.s_min <= other.s_min else (other, self)
        s = np.concatenate([a.s, b.s[1:]])
        y = np.concatenate([a.y, b.y[1:]])
        steps = sorted(a.steps + b.steps, key=lambda st: min(st.s0, st.s0 + st.h))
        status = a.status if a.status != "completed" else b.status
        return Solution(s=s, y=y, steps=steps, status=status)


def _error_norm(err: np.ndarray, y0: np.ndarray, y1: np.ndarray, atol: float, rtol: float) -> float:
    sk = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.sqrt(np.mean((err / sk) ** 2)))


def _initial_step(f, s0, y0, f0, direction, atol, rtol, max_step):
    sk = atol + rtol * np.abs(y0)
    d0 = float(np.sqrt(np.mean((y0 / sk) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / sk) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + h0 * direction * f0
    f1 = f(s0 + h0 * direction, y1)
    d2 = float(np.sqrt(np.mean(((f1 - f0) / sk) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return direction * min(100 * h0, h1, max_step)


def integrate_ode(
    f: Callable[[float, np.ndarray], np.ndarray],
    s0: float,
    y0: Sequence[float],
    s_end: float,
    config: IntegratorConfig | None = None,
    terminal_event: Callable[[float, np.ndarray], float] | None = None,
    domain_guard: Callable[[np.ndarray], float] | None = None,
) -> Solution:
    """Integrate y' = f(s, y) from s0 to s_end (either direction).

    ``terminal_event`` stops the run at a sign change of its value, located
    on the dense output; ``domain_guard`` works the same way but raises
    DomainExit with the partial solution attached.
    """
    cfg = config or IntegratorConfig()
    y0 = np.asarray(y0, dtype=float)
    if s_end == s0:
        return Solution(s=np.array([s0]), y=y0[None, :].copy(), steps=[])

    direction = 1.0 if s_end > s0 else -1.0
    f0 = np.asarray(f(s0, y0), dtype=float)
    h = _initial_step(f, s0, y0, f0, direction, cfg.abs_tol, cfg.rel_tol, cfg.max_step)

    ss = [s0]
    ys = [y0.copy()]
    steps: list[_DenseStep] = []
    k = [np.zeros_like(y0) for _ in range(7)]
    k[0] = f0
    s, y = s0, y0.copy()
    facold = 1e-4
    defect_tol = cfg.defect_factor * cfg.abs_tol
    h_cap = cfg.max_step
    guard_prev = domain_guard(y) if domain_guard is not None else None
    event_prev = terminal_event(s, y) if terminal_event is not None else None

    for _ in range(cfg.max_steps):
        if direction * (s + h - s_end) > 0.0:
            h = s_end - s
        if abs(h) < 1e-14 * max(1.0, abs(s)):
            raise StepUnderflow(f"step size {h:.3e} underflow at s={s:.6g}")

        k1 = k[0]
        k2 = np.asarray(f(s + 0.2 * h, y + (0.2 * h) * k1), dtype=float)
        k3 = np.asarray(f(s + 0.3 * h, y + h * (_A[2][0] * k1 + _A[2][1] * k2)), dtype=float)
        k4 = np.asarray(
            f(s + 0.8 * h, y + h * (_A[3][0] * k1 + _A[3][1] * k2 + _A[3][2] * k3)),
            dtype=float,
        )
        k5 = np.asarray(
            f(
                s + (8 / 9) * h,
                y + h * (_A[4][0] * k1 + _A[4][1] * k2 + _A[4][2] * k3 + _A[4][3] * k4),
            ),
            dtype=float,
        )
        k6 = np.asarray(
            f(
                s + h,
                y
                + h
                * (
                    _A[5][0] * k1
                    + _A[5][1] * k2
                    + _A[5][2] * k3
                    + _A[5][3] * k4
                    + _A[5][4] * k5
                ),
            ),
            dtype=float,
        )
        ynew = y + h * (
            _B5[0] * k1 + _B5[2] * k3 + _B5[3] * k4 + _B5[4] * k5 + _B5[5] * k6
        )
        # stage 7 is f at the step end (FSAL)
        k7 = np.asarray(f(s + h, ynew), dtype=float)
        err_vec = h * (
            _E[0] * k1 + _E[2] * k3 + _E[3] * k4 + _E[4] * k5 + _E[5] * k6 + _E[6] * k7
        )
        err = _error_norm(err_vec, y, ynew, cfg.abs_tol, cfg.rel_tol)

        if err <= 1.0:
            ydiff = ynew - y
            bspl = h * k1 - ydiff
            dense = _DenseStep(
                s0=s,
                h=h,
                r1=y.copy(),
                r2=ydiff,
                r3=bspl,
                r4=ydiff - h * k7 - bspl,
                r5=h
                * (
                    _D[0] * k1
                    + _D[2] * k3
                    + _D[3] * k4
                    + _D[4] * k5
                    + _D[5] * k6
                    + _D[6] * k7
                ),
            )
            if cfg.defect_factor > 0.0:
                defect = 0.0
                for th in (0.2, 0.5, 0.8):
                    sv = s + th * h
                    pv = dense.eval(sv)
                    defect = max(defect, float(np.max(np.abs(dense.deriv(sv) - f(sv, pv)))))
                # the defect of the interpolant cannot be measured below the
                # rounding noise of P'(s), which scales like eps |y| / h
                noise_floor = 1e-14 * (1.0 + float(np.max(np.abs(y)))) / abs(h)
                if defect > max(0.33 * defect_tol, noise_floor):
                    h_cap = 0.8 * abs(h) * (0.33 * defect_tol / defect) ** 0.25
                    h = direction * h_cap
                    continue
            k[6] = k7
            steps.append(dense)
            s_new = s + h

            stop_s = None
            status = "completed"
            if domain_guard is not None:
                g_new = domain_guard(ynew)
                if (guard_prev > 0.0 >= g_new) or (guard_prev < 0.0 <= g_new):
                    stop_s = _bisect_on_step(lambda sv: domain_guard(dense.eval(sv)), s, s_new)
                    status = "domain_exit"
                guard_prev = g_new
            if stop_s is None and terminal_event is not None:
                e_new = terminal_event(s_new, ynew)
                if (event_prev > 0.0 >= e_new) or (event_prev < 0.0 <= e_new):
                    stop_s = _bisect_on_step(
                        lambda sv: terminal_event(sv, dense.eval(sv)), s, s_new
                    )
                    status = "event"
                event_prev = e_new

            if stop_s is not None:
                ss.append(stop_s)
                ys.append(dense.eval(stop_s))
                sol = _finish(ss, ys, steps, direction, status)
                if status == "domain_exit":
                    raise DomainExit(sol)
                return sol

            # snap a final step that rounding left one ulp short of the target
            if abs(s_new - s_end) <= 1e-12 * max(1.0, abs(s_end)):
                s_new = s_end
            ss.append(s_new)
            ys.append(ynew.copy())
            s, y = s_new, ynew
            k[0] = k[6]  # FSAL
            if err > 0.0:
                fac = err**0.17 / facold**0.04  # PI (Lund) stabilization
                fac = max(0.1, min(5.0, fac / 0.9))
            else:
                fac = 0.1
            facold = max(err, 1e-4)
            h_cap = min(cfg.max_step, 1.05 * h_cap)  # relax the defect cap slowly
            h = direction * min(abs(h) / fac, h_cap)
            if direction * (s - s_end) >= 0.0:
                return _finish(ss, ys, steps, direction, "completed")
        else:
            fac11 = err**0.17
            h = h / min(5.0, fac11 / 0.9)

    raise RuntimeError(f"max_steps={cfg.max_steps} exceeded at s={s:.6g}")


def _bisect_on_step(g: Callable[[float], float], sa: float, sb: float) -> float:
    ga = g(sa)
    for _ in range(80):
        sm = 0.5 * (sa + sb)
        if sm == sa or sm == sb:
            break
        gm = g(sm)
        if (ga > 0.0 >= gm) or (ga < 0.0 <= gm):
            sb = sm
        else:
            sa, ga = sm, gm
        if abs(sb - sa) < 1e-13 * max(1.0, abs(sa)):
            break
    return sb


def _finish(ss, ys, steps, direction, status) -> Solution:
    s = np.array(ss)
    y = np.array(ys)
    if direction < 0:
        s = s[::-1]
        y = y[::-1]
        steps = list(reversed(steps))
    return Solution(s=s, y=y, steps=steps, status=status)


def _two_sided(f, y0, config, domain_guard=None) -> Solution:
    cfg = config
    parts = []
    exit_exc = None
    if cfg.s_min < 0.0:
        try:
            parts.append(integrate_ode(f, 0.0, y0, cfg.s_min, cfg, domain_guard=domain_guard))
        except DomainExit as exc:
            parts.append(exc.solution)
            exit_exc = exc
    if cfg.s_max > 0.0:
        try:
            parts.append(integrate_ode(f, 0.0, y0, cfg.s_max, cfg, domain_guard=domain_guard))
        except DomainExit as exc:
            parts.append(exc.solution)
            exit_exc = exc
    if not parts:
        raise ValueError("integration window [s_min, s_max] does not contain 0")
    sol = parts[0] if len(parts) == 1 else parts[0].merged_with(parts[1])
    if exit_exc is not None:
        raise DomainExit(sol)
    return sol


def _taunu_rhs(law: CurvatureLaw):
    def f(s, y):
        phi = law.fn(y[0], y[1])
        return np.array([1.0 + y[1] * phi, -y[0] * phi])

    return f


def _curve_rhs(law: CurvatureLaw):
    def f(s, y):
        phi = law.fn(y[0], y[1])
        return np.array([1.0 + y[1] * phi, -y[0] * phi, phi])

    return f


def _guard_for(law: CurvatureLaw):
    if law.min_radius <= 0.0:
        return None
    rmin = law.min_radius

    def g(y):
        return math.hypot(y[0], y[1]) - rmin

    return g


def integrate_curve(
    law: CurvatureLaw, init: InitialData, config: IntegratorConfig | None = None
) -> GeneratingCurve:
    """Integrate the full (tau, nu, theta) system and build the curve.

    The curve extends over [s_min, s_max] of the config unless the law's
    domain guard stops it first (DomainExit).
    """
    cfg = config or IntegratorConfig()
    tau0, nu0 = init.support_values()
    if not law.in_domain(tau0, nu0):
        raise ValueError(f"initial point {init.z0} outside the law's domain")
    y0 = np.array([tau0, nu0, init.theta0])
    sol = _two_sided(_curve_rhs(law), y0, cfg, domain_guard=_guard_for(law))
    return _curve_from_solution(sol, law, cfg)


def _curve_from_solution(sol: Solution, law: CurvatureLaw, cfg: IntegratorConfig) -> GeneratingCurve:
    tau, nu, theta = sol.y[:, 0], sol.y[:, 1], sol.y[:, 2]
    return GeneratingCurve(
        s=sol.s.copy(),
        tau=tau.copy(),
        nu=nu.copy(),
        theta=theta.copy(),
        k=np.asarray(law.fn(tau, nu), dtype=float),
        pitch=law.pitch,
        law=law,
        abs_tol=cfg.abs_tol,
        rel_tol=cfg.rel_tol,
        solution=sol,
    )


def integrate_tau_nu(
    law: CurvatureLaw, tau0: float, nu0: float, config: IntegratorConfig | None = None
) -> Solution:
    """Phase-plane integration of the (tau, nu) system alone."""
    cfg = config or IntegratorConfig()
    if not law.in_domain(tau0, nu0):
        raise ValueError(f"initial point ({tau0}, {nu0}) outside the law's domain")
    return _two_sided(_taunu_rhs(law), np.array([tau0, nu0]), cfg, domain_guard=_guard_for(law))


def _solution_of(trajectory) -> Solution:
    if isinstance(trajectory, Solution):
        return trajectory
    sol = getattr(trajectory, "solution", None)
    if sol is None:
        raise ValueError("trajectory carries no dense output")
    return sol


def detect_events(
    trajectory,
    event: Callable[[float, np.ndarray], float],
    n_sub: int = 8,
    tol: float = 1e-10,
) -> list[tuple[float, np.ndarray]]:
    """Locate the zeros of a scalar event function along a trajectory.

    Sign changes are bracketed on an ``n_sub``-point subdivision of every
    accepted step and then refined by bisection on the dense output to the
    requested tolerance in s.
    """
    sol = _solution_of(trajectory)
    found: list[tuple[float, np.ndarray]] = []
    for step in sol.steps:
        sa_edge, sb_edge = step.s0, step.s0 + step.h
        grid = np.linspace(sa_edge, sb_edge, n_sub + 1)
        vals = [event(float(sv), step.eval(float(sv))) for sv in grid]
        for i in range(n_sub):
            ga, gb = vals[i], vals[i + 1]
            if ga == 0.0:
                _append_unique(found, float(grid[i]), step.eval(float(grid[i])), tol)
                continue
            if (ga > 0.0 > gb) or (ga < 0.0 < gb):
                sa, sb = float(grid[i]), float(grid[i + 1])
                while abs(sb - sa) > tol:
                    sm = 0.5 * (sa + sb)
                    gm = event(sm, step.eval(sm))
                    if (ga > 0.0 > gm) or (ga < 0.0 < gm):
                        sb = sm
                    else:
                        sa, ga = sm, gm
                s_star = 0.5 * (sa + sb)
                _append_unique(found, s_star, step.eval(s_star), tol)
    found.sort(key=lambda ev: ev[0])
    return found


def _append_unique(found, s, y, tol):
    for s_prev, _ in found:
        if abs(s_prev - s) <= 10.0 * tol:
            return
    found.append((s, y))


def conserved_drift(trajectory, quantity: Callable[[float, float], float], n_sub: int = 4) -> float:
    """sup |Q(tau, nu) - Q(tau(0-th sample), nu(0-th sample))| along a run."""
    sol = _solution_of(trajectory)
    q0 = quantity(float(sol.y[0][0]), float(sol.y[0][1]))
    worst = 0.0
    for step in sol.steps:
        for sv in np.linspace(step.s0, step.s0 + step.h, n_sub + 1):
            y = step.eval(float(sv))
            worst = max(worst, abs(quantity(float(y[0]), float(y[1])) - q0))
    return worst


def resample_arclength(curve: GeneratingCurve, ds: float) -> GeneratingCurve:
    """Uniform resampling by dense-output interpolation.

    The grid starts at the first sample and contains
    floor((s_max - s_min)/ds) + 1 points; curvature at the new samples is
    re-evaluated from the law.
    """
    if ds <= 0.0:
        raise ValueError("ds must be positive")
    sol = _solution_of(curve)
    span = sol.s_max - sol.s_min
    n = int(math.floor(span / ds + 1e-12)) + 1
    grid = sol.s_min + ds * np.arange(n)
    ys = sol(grid)
    tau, nu, theta = ys[:, 0], ys[:, 1], ys[:, 2]
    k = np.asarray(curve.law.fn(tau, nu), dtype=float) if curve.law else np.zeros_like(tau)
    return replace(curve, s=grid, tau=tau, nu=nu, theta=theta, k=k)


def ode_residual(curve: GeneratingCurve, n_sub: int = 4) -> float:
    """Max deviation of the dense interpolant's derivative from the ODE
    right-hand side, checked on a subdivision of every accepted step."""
    sol = _solution_of(curve)
    law = curve.law
    worst = 0.0
    for step in sol.steps:
        for sv in np.linspace(step.s0, step.s0 + step.h, n_sub + 1)[1:-1]:
            y = step.eval(float(sv))
            dy = step.deriv(float(sv))
            phi = law.fn(float(y[0]), float(y[1]))
            res = [dy[0] - (1.0 + y[1] * phi), dy[1] + y[0] * phi]
            if len(y) > 2:
                res.append(dy[2] - phi)
            worst = max(worst, max(abs(v) for v in res))
    return worst
