import math

import numpy as np
import pytest

from helisurf.engine import IntegratorConfig, InitialData, integrate_curve, resample_arclength
from helisurf.geometry import Pitch, reconstruct_points
from helisurf.motions import MotionSpec, sample_helicoidal_surface, soliton_residual, z_rotation_generator
from helisurf.rotating import (
    CurveTooShort,
    convergence_experiment,
    generate_rotating_curve,
    h0_rhs,
    h0_trajectory,
    limit_circle,
    polyline_self_intersects,
    rotating_law,
    verify_soliton_structure,
)


def test_law_values():
    law = rotating_law(Pitch.finite(1.0))
    assert law(0.0, 0.0) == 0.0
    assert law(1.0, 0.0) == pytest.approx(1.0)
    law_inf = rotating_law(Pitch.infinite())
    rng = np.random.default_rng(2)
    for _ in range(20):
        t, n = rng.normal(size=2) * 3
        assert law_inf(t, n) == t


def test_no_equilibria_on_grid():
    # the finite-pitch system has no rest points
    grid = np.linspace(-5.0, 5.0, 200)
    T, N = np.meshgrid(grid, grid)
    for h in (0.25, 1.0, 4.0):
        r2h2 = T**2 + N**2 + h * h
        dtau = (T**2 + h * h) * (1.0 + T * N) / r2h2
        dnu = (T * N - T**2 * (T**2 + h * h)) / r2h2
        assert float(np.min(np.hypot(dtau, dnu))) > 0.0


def test_structure_report_counts_and_defects():
    for h in (0.5, 1.0, 5.0):
        for A in (0.0, 1.0):
            curve = generate_rotating_curve(Pitch.finite(h), A, 50.0)
            rep = verify_soliton_structure(curve)
            assert rep.tau_zero_count == 1
            assert rep.k_zero_count == 1
            assert rep.r_extremum_count == 1
            assert rep.r_min_value == pytest.approx(A, abs=1e-8)
            # nu runs to -inf on the right arm and +inf on the left
            assert rep.nu_ends[0] > 5.0 and rep.nu_ends[1] < -5.0
            assert rep.k_ends[0] < 0.0 < rep.k_ends[1]
            assert max(rep.angle_defects) < 0.1
            assert rep.max_residual < 1e-9


def test_symmetric_curve_tau_zero_at_origin():
    curve = generate_rotating_curve(Pitch.finite(1.0), 0.0, 25.0)
    rep = verify_soliton_structure(curve)
    assert rep.r_min_s == pytest.approx(0.0, abs=1e-9)


def test_structure_rejects_short_window():
    curve = generate_rotating_curve(Pitch.finite(1.0), 0.0, 10.0)
    with pytest.raises(CurveTooShort):
        verify_soliton_structure(curve)


def test_ratio_nu_over_tau_decreasing_in_first_quadrant():
    curve = generate_rotating_curve(Pitch.finite(1.0), 1.0, 30.0)
    dense = resample_arclength(curve, 0.01)
    mask = (dense.tau > 1e-6) & (dense.nu > 1e-6)
    ratio = dense.nu[mask] / dense.tau[mask]
    s_sel = dense.s[mask]
    order = np.argsort(s_sel)
    assert np.all(np.diff(ratio[order]) < 1e-9)


def test_position_angle_grows_along_arms():
    # each arm spirals around the origin; at |s| = 50 it has wound more
    # than a full turn past the start for every tested pitch
    for h in (0.5, 1.0):
        for A in (0.0, 1.0):
            curve = generate_rotating_curve(Pitch.finite(h), A, 50.0)
            dense = resample_arclength(curve, 0.01)
            pts = dense.points()
            phi = np.unwrap(np.arctan2(pts[:, 1], pts[:, 0]))
            i0 = int(np.argmin(np.abs(dense.s)))
            right = phi[-1] - phi[i0]
            left = phi[0] - phi[i0]
            assert right > 2.0 * math.pi
            assert left > 2.0 * math.pi


def test_soliton_residual_on_surface():
    spec = MotionSpec(0.0, z_rotation_generator(), np.zeros(3))
    for h in (0.5, 1.0, 5.0):
        curve = generate_rotating_curve(Pitch.finite(h), 1.0, 20.0)
        samples = sample_helicoidal_surface(curve)
        assert soliton_residual(samples, spec) < 1e-8


def test_embeddedness_breaks_at_distance_one():
    # the symmetric curve stays embedded; the curve at distance 1 (h = 1)
    # crosses itself
    sym = generate_rotating_curve(Pitch.finite(1.0), 0.0, 20.0)
    pts = resample_arclength(sym, 1e-3).points()
    assert not polyline_self_intersects(pts)
    far = generate_rotating_curve(Pitch.finite(1.0), 1.0, 30.0)
    pts = resample_arclength(far, 1e-3).points()
    assert polyline_self_intersects(pts)


def test_h0_trajectory_cubic_residual():
    for a in (0.0, 0.7, -1.3):
        tr = h0_trajectory(a)
        assert tr.cubic_residual() < 1e-10
        # passes through the origin
        d = np.min(np.hypot(tr.tau, tr.nu))
        assert d < 1e-12
        # slope at the origin is a
        idx = np.argmin(np.hypot(tr.tau, tr.nu))
        for j in (idx - 3, idx + 3):
            assert tr.nu[j] / tr.tau[j] == pytest.approx(a, abs=0.05)


def test_h0_fixed_points_on_nu_axis():
    for nu in (-2.0, 0.5, 3.0):
        dtau, dnu = h0_rhs(0.0, nu)
        assert dtau == 0.0 and dnu == 0.0
    with pytest.raises(ZeroDivisionError):
        h0_rhs(0.0, 0.0)


def test_large_pitch_approaches_curve_shortening_curve():
    cfg = IntegratorConfig(s_min=-5.0, s_max=5.0)
    grid = np.linspace(-5.0, 5.0, 301)
    ref = integrate_curve(rotating_law(Pitch.infinite()), InitialData((0.0, 1.0), 0.0), cfg)
    ref_vals = ref.solution(grid)
    dists = []
    for h in (2.0, 5.0, 10.0):
        c = integrate_curve(rotating_law(Pitch.finite(h)), InitialData((0.0, 1.0), 0.0), cfg)
        vals = c.solution(grid)
        dists.append(float(np.max(np.hypot(vals[:, 0] - ref_vals[:, 0], vals[:, 1] - ref_vals[:, 1]))))
    assert dists[0] > dists[1] > dists[2]
    assert dists[2] < 0.05


def test_convergence_to_constant_solution():
    tbl = convergence_experiment(1.0, [0.1, 0.05, 0.025], deriv_order=2)
    c0 = tbl.c0()
    assert c0[0] > c0[1] > c0[2]
    c1 = [row[1] for row in tbl.distances]
    c2 = [row[2] for row in tbl.distances]
    assert c1[0] > c1[1] > c1[2]
    assert c2[0] > c2[1] > c2[2]
    # the law depends on the pitch only through h^2, so the measured rate
    # is quadratic
    assert tbl.slope == pytest.approx(2.0, abs=0.1)
    with pytest.raises(ValueError):
        convergence_experiment(0.0, [0.1])
    with pytest.raises(ValueError):
        convergence_experiment(1.0, [0.1], deriv_order=3)


def test_reconstructed_curves_converge_to_limit_circle():
    grid = np.linspace(-5.0, 5.0, 401)
    errs = []
    for h in (0.1, 0.05, 0.025):
        cfg = IntegratorConfig(s_min=-5.0, s_max=5.0)
        c = integrate_curve(rotating_law(Pitch.finite(h)), InitialData((0.0, 1.0), 0.0), cfg)
        ys = c.solution(grid)
        pts = reconstruct_points(ys[:, 0], ys[:, 1], ys[:, 2])
        circle = limit_circle(1.0, grid)
        errs.append(float(np.max(np.hypot(*(pts - circle).T))))
    assert errs[0] > errs[1] > errs[2]
    assert errs[-1] < 0.05


def test_negative_start_distance_normalized():
    a = generate_rotating_curve(Pitch.finite(1.0), -1.0, 5.0)
    b = generate_rotating_curve(Pitch.finite(1.0), 1.0, 5.0)
    assert np.array_equal(a.tau, b.tau) and np.array_equal(a.nu, b.nu)
