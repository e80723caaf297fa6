import math

import numpy as np
import pytest

from helisurf.cmc import (
    RatioOutOfRange,
    alpha,
    classify_closed,
    cmc_law,
    delta_phi,
    delta_theta,
    elliptic_E,
    excursion_period,
    find_R,
    generate_cmc_curve,
    involution_phi,
    winding_number,
)
from helisurf.engine import conserved_drift
from helisurf.geometry import Pitch
from helisurf.quadrature import gauss_kronrod, periodic_trapezoid


def oracle_E(k: float, n: int = 200) -> float:
    """Independent fixed-order Gauss-Legendre quadrature of the defining
    integral of the complete elliptic integral of the second kind."""
    x, w = np.polynomial.legendre.leggauss(n)
    th = 0.25 * math.pi * (x + 1.0)
    return float(np.sum(w * np.sqrt(1.0 - k * k * np.sin(th) ** 2)) * 0.25 * math.pi)


def test_law_values():
    law = cmc_law(Pitch.finite(1.0))
    assert law(0.0, -1.0) == pytest.approx(1.0)  # unit circle fixed point
    assert law(0.0, 0.0) == pytest.approx(1.0)
    law_inf = cmc_law(Pitch.infinite())
    assert law_inf(3.0, -2.0) == 1.0
    with pytest.raises(ValueError):
        cmc_law(Pitch.finite(1.0), H=0.0)


def test_law_gives_constant_mean_curvature():
    rng = np.random.default_rng(31)
    for h in (0.3, 1.0, 2.5):
        law = cmc_law(Pitch.finite(h))
        from helisurf.geometry import mean_curvature

        for _ in range(30):
            tau, nu = rng.normal(size=2) * 2.0
            k = law(tau, nu)
            assert mean_curvature(tau, nu, k, Pitch.finite(h)) == pytest.approx(-1.0, abs=1e-12)


def test_involution_is_norm_preserving_involution():
    rng = np.random.default_rng(37)
    for _ in range(1000):
        x1, x2 = rng.normal(size=2) * 3.0
        h = float(rng.uniform(0.1, 5.0))
        pitch = Pitch.finite(h)
        y1, y2 = involution_phi(x1, x2, pitch)
        assert math.hypot(y1, y2) == pytest.approx(math.hypot(x1, x2), rel=1e-13, abs=1e-13)
        z1, z2 = involution_phi(y1, y2, pitch)
        assert (z1, z2) == pytest.approx((x1, x2), rel=1e-11, abs=1e-11)


def test_involution_special_points():
    for h in (0.5, 1.0, 3.0):
        for R in (0.0, 0.7, 2.0):
            out = involution_phi(0.0, -(1.0 + R), Pitch.finite(h))
            assert out == pytest.approx((-(1.0 + R), 0.0), abs=1e-14)
    # fixed-point correspondence: (nu, tau) = (-1, 0) maps to (x, y) = (0, -1)
    assert involution_phi(-1.0, 0.0, Pitch.finite(1.0)) == pytest.approx((0.0, -1.0))
    # reflection at infinite pitch
    assert involution_phi(0.3, -0.8, Pitch.infinite()) == (-0.8, 0.3)


def test_elliptic_E_special_values():
    assert elliptic_E(0.0) == pytest.approx(math.pi / 2, abs=1e-16)
    assert elliptic_E(1.0) == 1.0
    with pytest.raises(ValueError):
        elliptic_E(-0.1)
    with pytest.raises(ValueError):
        elliptic_E(1.0 + 1e-12)


def test_elliptic_E_against_quadrature_oracle():
    # frozen oracle value at the h = 1 modulus
    k_h1 = 2.0 / math.sqrt(5.0)
    assert oracle_E(k_h1) == pytest.approx(1.1784899243278388, abs=1e-15)
    assert abs(elliptic_E(k_h1) - 1.1784899243278388) < 1e-13
    for k in (0.1, 0.45, 0.8, 0.99, 0.9999):
        assert abs(elliptic_E(k) - oracle_E(k)) < 1e-13


def test_delta_theta_closed_form_endpoints():
    for h in (0.2, 0.5, 1.0, 2.0, 5.0):
        pitch = Pitch.finite(h)
        exact0 = 2.0 * math.pi * math.sqrt(h * h + 1.0) / h
        assert abs(delta_theta(0.0, pitch) - exact0) < 1e-11
        root = math.sqrt(h * h + 4.0)
        exact1 = 2.0 * root / h * elliptic_E(2.0 / root) + math.pi
        assert abs(delta_theta(1.0, pitch) - exact1) < 1e-11


def test_delta_theta_value_h1_R0():
    assert delta_theta(0.0, Pitch.finite(1.0)) == pytest.approx(8.885765876316732, abs=1e-11)


def test_delta_theta_infinite_pitch_and_tail():
    assert delta_theta(3.7, Pitch.infinite()) == 2.0 * math.pi
    assert abs(delta_theta(1e4, Pitch.finite(1.0)) - 2.0 * math.pi) < 1e-3


def test_delta_theta_quadrature_against_trapezoid():
    # the adaptive Gauss-Kronrod value must agree with the spectrally
    # convergent periodic trapezoid rule
    from helisurf.cmc import _dtheta_integrand

    for h in (0.3, 1.0, 4.0):
        for R in (0.0, 0.5, 1.0, 2.5):
            f = _dtheta_integrand(R, h)
            gk = gauss_kronrod(f, -math.pi, math.pi, tol=1e-13)
            tz = periodic_trapezoid(f, -math.pi, math.pi, tol=1e-13)
            assert abs(gk - tz) < 1e-11


def test_delta_phi_relation():
    pitch = Pitch.finite(2.0)
    assert delta_phi(0.0, pitch) == pytest.approx(delta_theta(0.0, pitch))
    assert delta_phi(0.0, pitch) == pytest.approx(math.pi * math.sqrt(5.0), abs=1e-11)
    assert delta_phi(1.0, pitch) == pytest.approx(delta_theta(1.0, pitch) - math.pi)
    assert delta_phi(3.0, pitch) == pytest.approx(delta_theta(3.0, pitch) - 2 * math.pi)
    # R = 1 closed form
    h = 1.0
    root = math.sqrt(5.0)
    assert delta_phi(1.0, Pitch.finite(h)) == pytest.approx(2.0 * root * elliptic_E(2.0 / root), abs=1e-11)
    assert delta_phi(1e4, Pitch.finite(1.0)) < 1e-3


def test_delta_theta_monotone_on_grid():
    for h in (0.2, 0.5, 1.0, 2.0, 5.0):
        pitch = Pitch.finite(h)
        vals = [delta_theta(R, pitch) for R in np.arange(0.0, 5.0001, 0.1)]
        assert all(a > b for a, b in zip(vals, vals[1:]))


def test_alpha_values_and_consistency():
    assert alpha(Pitch.infinite()) == 1.0
    for h in (0.5, 1.0, 5.0):
        pitch = Pitch.finite(h)
        # two independent routes: the elliptic formula and dphi(1, h)
        assert delta_phi(1.0, pitch) == pytest.approx(2.0 * math.pi * (alpha(pitch) - 0.5), abs=1e-10)
    # alpha squeezes to 1 as the pitch grows
    assert alpha(Pitch.finite(5.0)) < 1.02
    a1 = alpha(Pitch.finite(1.0))
    assert a1 == pytest.approx(math.sqrt(5.0) / math.pi * oracle_E(2.0 / math.sqrt(5.0)) + 0.5, abs=1e-13)


def test_find_R_admissibility():
    with pytest.raises(RatioOutOfRange):
        find_R(2, 1, Pitch.finite(1.0))  # 2 > sqrt(2)
    with pytest.raises(RatioOutOfRange):
        find_R(1, 1, Pitch.finite(1.0))
    with pytest.raises(ValueError):
        find_R(4, 2, Pitch.finite(1.0))  # not coprime
    # admissible at smaller pitch
    R = find_R(2, 1, Pitch.finite(0.5))
    assert R > 0.0


def test_find_R_solves_the_period_equation():
    pitch = Pitch.finite(1.0)
    R = find_R(4, 3, pitch)
    assert R == pytest.approx(1.0435305643636, abs=1e-9)
    assert abs(delta_theta(R, pitch) - 8.0 * math.pi / 3.0) < 1e-10
    # independent check through the trapezoid rule
    from helisurf.cmc import _dtheta_integrand

    tz = periodic_trapezoid(_dtheta_integrand(R, 1.0), -math.pi, math.pi, tol=1e-13)
    assert abs(tz - 8.0 * math.pi / 3.0) < 1e-9


def test_excursion_period_closed_forms():
    assert excursion_period(0.0, Pitch.finite(1.0)) == pytest.approx(2 * math.pi * math.sqrt(2), abs=1e-11)
    for h in (0.4, 2.0):
        assert excursion_period(0.0, Pitch.finite(h)) == pytest.approx(
            2 * math.pi * math.sqrt(1 + h * h) / h, abs=1e-10
        )


def test_generate_cmc_fixed_point():
    curve, traj = generate_cmc_curve(0.0, Pitch.finite(1.0))
    assert np.max(np.abs(traj.tau)) < 1e-12
    assert np.max(np.abs(traj.nu + 1.0)) < 1e-12
    assert traj.period == pytest.approx(2 * math.pi * math.sqrt(2), abs=1e-10)


def test_generate_cmc_circle_conservation_and_annulus():
    from helisurf.engine import detect_events

    for R in (0.5, 1.0, 2.0):
        for h in (0.5, 1.0):
            pitch = Pitch.finite(h)
            curve, traj = generate_cmc_curve(R, pitch, n_excursions=1)
            x, y = traj.circle_coordinates()
            drift = np.max(np.abs(x**2 + (y + 1.0) ** 2 - R * R))
            assert drift < 1e-9
            r = np.hypot(traj.tau, traj.nu)
            assert float(np.min(r)) > abs(R - 1.0) - 1e-9
            assert float(np.max(r)) < R + 1.0 + 1e-9
            # r extrema sit at the tau zeros (dr^2/ds = 2 tau): one touch of
            # each annulus boundary per period, outer at the period ends
            zeros = detect_events(curve, lambda s, yv: yv[0])
            interior = [(s, yv) for s, yv in zeros if 1e-6 < s < traj.period - 1e-6]
            assert len(interior) == 1
            s_in, y_in = interior[0]
            assert math.hypot(y_in[0], y_in[1]) == pytest.approx(abs(R - 1.0), abs=1e-8)
            assert s_in == pytest.approx(0.5 * traj.period, rel=1e-6)
            assert math.hypot(traj.tau[0], traj.nu[0]) == pytest.approx(R + 1.0, abs=1e-12)
            assert math.hypot(traj.tau[-1], traj.nu[-1]) == pytest.approx(R + 1.0, abs=1e-8)


def test_cmc_conserved_drift_through_involution():
    h = 1.0
    pitch = Pitch.finite(h)
    curve, traj = generate_cmc_curve(1.5, pitch, n_excursions=2)

    def circle_radius_sq(tau, nu):
        root = math.sqrt(tau * tau + h * h)
        x = math.sqrt(tau * tau + nu * nu + h * h) / root * tau
        y = h * nu / root
        return x * x + (y + 1.0) ** 2

    assert conserved_drift(curve, circle_radius_sq) < 1e-9


def test_generate_cmc_origin_passage_at_R_one():
    curve, traj = generate_cmc_curve(1.0, Pitch.finite(1.0))
    pts = traj.solution(np.linspace(0.0, traj.period, 4001))
    from helisurf.geometry import reconstruct_points

    xy = reconstruct_points(pts[:, 0], pts[:, 1], pts[:, 2])
    assert float(np.min(np.hypot(xy[:, 0], xy[:, 1]))) < 1e-6


def test_excursion_period_matches_ode():
    for R, h in ((1.0, 1.0), (2.3, 0.7)):
        pitch = Pitch.finite(h)
        curve, traj = generate_cmc_curve(R, pitch)
        assert abs(excursion_period(R, pitch) - traj.period) < 1e-8


def test_mean_curvature_minus_one_along_curve():
    curve, traj = generate_cmc_curve(1.7, Pitch.finite(0.8), n_excursions=1)
    H = curve.mean_curvatures()
    assert np.max(np.abs(H + 1.0)) < 1e-9


def test_classification_4_3_1():
    rep = classify_closed(4, 3, Pitch.finite(1.0))
    assert rep.closure_error < 1e-6 * (rep.R + 1.0)
    assert rep.rotation_number == 4
    assert rep.rotation_residual < 1e-6
    # 4/3 < alpha_1, so the curve winds p - q = 1 times about the origin
    assert 4.0 / 3.0 < rep.alpha
    assert rep.winding_number == 1
    assert rep.trichotomy == "winding p-q"
    assert rep.symmetry_error < 1e-6


def test_classification_above_alpha():
    # 2/1 = 2 > alpha_{1/2} ~ 1.89: winding equals the rotation number
    rep = classify_closed(2, 1, Pitch.finite(0.5))
    assert rep.alpha < 2.0
    assert rep.rotation_number == 2
    assert rep.winding_number == 2
    assert rep.trichotomy == "winding p"


def test_generate_cmc_input_validation():
    with pytest.raises(ValueError):
        generate_cmc_curve(-0.5, Pitch.finite(1.0))
    with pytest.raises(ValueError):
        generate_cmc_curve(1.0, Pitch.finite(1.0), n_excursions=0)
    with pytest.raises(ValueError):
        generate_cmc_curve(1.0, Pitch.infinite())
    with pytest.raises(ValueError):
        excursion_period(1.0, Pitch.infinite())


def test_figure_caption_triples_admissible():
    triples = [
        (1, 4, 3), (1, 6, 5), (1, 11, 8), (1, 19, 15),
        (0.5, 2, 1), (0.5, 3, 2), (0.5, 5, 3), (0.5, 11, 6),
        (0.2, 15, 4), (0.2, 13, 5), (2, 11, 10), (2, 29, 26),
        (5, 52, 51), (5, 55, 54),
    ]
    for h, p, q in triples:
        assert math.gcd(p, q) == 1
        assert 1.0 < p / q < math.sqrt(h * h + 1.0) / h, (h, p, q)
    # the h = 5 pair sits extremely close to its admissibility bound
    assert 52 / 51 == pytest.approx(math.sqrt(26.0) / 5.0, abs=2e-4)


def test_winding_number_helper():
    t = np.linspace(0.0, 2.0 * math.pi, 400)
    circle = np.stack([np.cos(t), np.sin(t)], axis=-1)
    assert winding_number(circle) == 1
    assert winding_number(circle[::-1]) == -1
    assert winding_number(circle * 3.0 + np.array([5.0, 0.0])) == 0
    assert winding_number(np.array([[1.0, 0.0], [1e-9, 0.0]])) is None
