import math

import numpy as np
import pytest

from circumnav import (
    NoSolutionError,
    RecurrentSet,
    control_bearing,
    epsilon_max,
    generator_grid_check,
    generator_lyapunov,
    inner_drift_minimum,
    inner_radii,
    inner_radii_epsilon,
    lyapunov,
    make_params,
    r_a_epsilon,
    recurrence_bound,
    recurrent_set,
)
from circumnav.analysis import (
    inner_epsilon_quartic_residual,
    inner_radius_residual,
    inner_worst_drift,
    outer_margin_residual,
)

TWO_PI = 2.0 * math.pi
P1 = make_params(1.0, 10.0, 1.0)


def quartic_roots_oracle(p, eps):
    """Independent route to the g(r) = -eps roots: companion-matrix eigenvalues
    of the sign-corrected quartic, filtered to (r_i-, r_i+)."""
    a = p.r_s**2 / p.k**2
    roots = np.roots([1.0, 0.0, a * (eps**2 - p.k**2), 2.0 * eps * a, a])
    radii = inner_radii(p)
    real = sorted(
        z.real
        for z in roots
        if abs(z.imag) < 1e-9 and radii.r_i_minus < z.real < radii.r_i_plus
    )
    return real


def r_star_oracle(p):
    """Closed-form radical solution of the minimizer cubic (Cardano form)."""
    s, k = p.r_s, p.k
    A = 9.0 * (s * k) ** 4 + math.sqrt(81.0 * (s * k) ** 8 + 12.0 * (s * k) ** 6)
    y = (A / (18.0 * k**6)) ** (1.0 / 3.0) - ((2.0 / 3.0) * s**6 / A) ** (1.0 / 3.0)
    return math.sqrt(y)


class TestInnerRadii:
    def test_no_solution_band(self):
        assert inner_radii(make_params(0.2, 10.0, 1.0)) is None

    def test_empty_at_minimal_gain(self):
        # k = 1/r_d gives r_s = 0: no inner region at all
        assert inner_radii(make_params(0.1, 10.0, 1.0)) is None

    def test_reference_values(self):
        radii = inner_radii(P1)
        assert radii.r_i_minus == pytest.approx(1.00514, abs=1e-5)
        assert radii.r_i_plus == pytest.approx(9.89897, abs=1e-5)
        assert 0.0 < radii.r_i_minus < radii.r_i_plus < P1.r_s

    def test_roots_satisfy_quartic(self):
        for k in (math.sqrt(5) / 10.0, 0.5, 1.0, 2.0, 5.0):
            p = make_params(k, 10.0, 1.0)
            radii = inner_radii(p)
            for r in (radii.r_i_minus, radii.r_i_plus):
                assert abs(inner_radius_residual(p, r)) < 1e-8

    def test_roots_are_inner_equilibria(self):
        radii = inner_radii(P1)
        for r in (radii.r_i_minus, radii.r_i_plus):
            assert P1.V / r == pytest.approx(control_bearing(P1, r, math.pi / 2), abs=1e-9)

    def test_double_root_at_existence_boundary(self):
        p = make_params(math.sqrt(5) / 10.0, 10.0, 1.0)
        radii = inner_radii(p)
        assert radii.r_i_minus == pytest.approx(math.sqrt(40.0), rel=1e-7)
        assert radii.r_i_minus == pytest.approx(radii.r_i_plus, rel=1e-7)


class TestLyapunov:
    def test_outside_value(self):
        expected = (15.0 - math.sqrt(99.0)) + math.pi / 2 + TWO_PI
        assert lyapunov(P1, 15.0, math.pi / 2) == pytest.approx(expected, rel=1e-12)

    def test_sgn_zero_on_kink(self):
        for th in (0.0, 1.0, 5.0):
            assert lyapunov(P1, P1.r_s, th) == pytest.approx(TWO_PI / P1.V, rel=1e-15)

    def test_inside_value(self):
        expected = (math.sqrt(99.0) - 5.0) - math.pi + TWO_PI
        assert lyapunov(P1, 5.0, math.pi) == pytest.approx(expected, rel=1e-12)

    def test_positive_everywhere(self):
        rng = np.random.default_rng(20)
        for _ in range(2000):
            assert lyapunov(P1, rng.uniform(0.01, 40.0), rng.uniform(0.0, TWO_PI)) > 0.0

    def test_rejects_bad_range(self):
        with pytest.raises(ValueError):
            lyapunov(P1, 0.0, 1.0)


class TestGeneratorLyapunov:
    def test_zero_at_orbit_equilibrium(self):
        assert generator_lyapunov(P1, 10.0, math.pi / 2) == pytest.approx(0.0, abs=1e-12)

    def test_outer_hand_value(self):
        expected = -(1.0 + math.sqrt(45.0)) / 12.0
        assert generator_lyapunov(P1, 12.0, 3 * math.pi / 2) == pytest.approx(expected, rel=1e-12)

    def test_inner_hand_value(self):
        expected = -1.0 / 5.0 - math.sqrt(74.0) / math.sqrt(99.0)
        assert generator_lyapunov(P1, 5.0, math.pi / 2) == pytest.approx(expected, rel=1e-12)

    def test_undefined_on_kink(self):
        with pytest.raises(ValueError, match="singular radius"):
            generator_lyapunov(P1, P1.r_s, 1.0)

    def test_matches_finite_difference_generator(self):
        # drift operator applied to V by central differences; diffusion term
        # vanishes because d2V/dtheta2 = 0
        h = 1e-5
        h2 = 1e-3  # second difference needs a wider step to beat roundoff
        sigma = 0.5
        rng = np.random.default_rng(21)
        checked = 0
        while checked < 10_000:
            r = rng.uniform(0.5, 15.0)
            th = rng.uniform(0.1, TWO_PI - 0.1)  # keep theta +/- h off the wrap seam
            if abs(r - P1.r_s) < 1e-3:
                continue
            dv_dr = (lyapunov(P1, r + h, th) - lyapunov(P1, r - h, th)) / (2 * h)
            dv_dth = (lyapunov(P1, r, th + h) - lyapunov(P1, r, th - h)) / (2 * h)
            d2v_dth2 = (
                lyapunov(P1, r, th + h2) - 2 * lyapunov(P1, r, th) + lyapunov(P1, r, th - h2)
            ) / h2**2
            assert abs(d2v_dth2) < 1e-7
            drift_r = -P1.V * math.cos(th)
            drift_th = P1.V * math.sin(th) / r + control_bearing(P1, r, th)
            fd = drift_r * dv_dr + drift_th * dv_dth + 0.5 * P1.k**2 * sigma**2 * d2v_dth2
            assert fd == pytest.approx(generator_lyapunov(P1, r, th), abs=1e-6)
            checked += 1


class TestOuterBoundary:
    def test_reference_value(self):
        assert r_a_epsilon(P1, 0.1) == pytest.approx(10.15190, abs=5e-5)

    def test_worst_case_identity(self):
        for eps in (0.01, 0.05, 0.1, 0.5):
            r = r_a_epsilon(P1, eps)
            assert abs(outer_margin_residual(P1, eps, r)) < 1e-9

    def test_limit_recovers_orbit_radius(self):
        assert r_a_epsilon(P1, 1e-12) == pytest.approx(10.0, abs=1e-9)

    def test_rejects_eps_at_gain(self):
        with pytest.raises(NoSolutionError):
            r_a_epsilon(P1, 1.0)
        with pytest.raises(ValueError):
            r_a_epsilon(P1, 0.0)


class TestInnerBoundaries:
    def test_reference_values(self):
        lo, hi = inner_radii_epsilon(P1, 0.1)
        assert lo == pytest.approx(1.119, abs=2e-3)
        assert hi == pytest.approx(9.742, abs=2e-3)

    def test_against_polynomial_oracle(self):
        for eps in (0.02, 0.05, 0.1, 0.3):
            mine = inner_radii_epsilon(P1, eps)
            oracle = quartic_roots_oracle(P1, eps)
            assert len(oracle) == 2
            assert mine[0] == pytest.approx(oracle[0], abs=1e-8)
            assert mine[1] == pytest.approx(oracle[1], abs=1e-8)

    def test_quartic_residuals(self):
        for eps in (0.02, 0.05, 0.1):
            for r in inner_radii_epsilon(P1, eps):
                assert abs(inner_epsilon_quartic_residual(P1, eps, r)) < 1e-8

    def test_limits_recover_inner_radii(self):
        radii = inner_radii(P1)
        lo, hi = inner_radii_epsilon(P1, 1e-9)
        assert lo == pytest.approx(radii.r_i_minus, abs=1e-6)
        assert hi == pytest.approx(radii.r_i_plus, abs=1e-6)

    def test_none_past_margin(self):
        assert inner_radii_epsilon(P1, 0.7) is None

    def test_none_without_inner_region(self):
        assert inner_radii_epsilon(make_params(0.2, 10.0, 1.0), 0.05) is None


class TestEpsilonMax:
    def test_reference_values(self):
        r_star, g_min = inner_drift_minimum(P1)
        assert r_star == pytest.approx(4.4567, abs=1e-3)
        assert g_min == pytest.approx(-0.6697, abs=1e-3)
        assert epsilon_max(P1) == pytest.approx(0.1, abs=1e-6)

    def test_cubic_against_radical_oracle(self):
        for k in (0.3, 0.5, 1.0, 2.0):
            p = make_params(k, 10.0, 1.0)
            r_star, _ = inner_drift_minimum(p)
            assert r_star == pytest.approx(r_star_oracle(p), rel=1e-9)

    def test_stationarity(self):
        # analytic g'(r) vanishes at the minimizer
        for k in (0.5, 1.0, 2.0):
            p = make_params(k, 10.0, 1.0)
            r_star, _ = inner_drift_minimum(p)
            s = p.r_s
            gprime = -1.0 / r_star**2 + p.k * r_star / (s * math.sqrt(s * s - r_star * r_star))
            assert abs(gprime) < 1e-8

    def test_zero_at_existence_boundary(self):
        p = make_params(math.sqrt(5) / 10.0, 10.0, 1.0)
        assert epsilon_max(p) == pytest.approx(0.0, abs=1e-6)

    def test_not_applicable_without_inner_region(self):
        with pytest.raises(NoSolutionError, match="inner region empty"):
            epsilon_max(make_params(0.2, 10.0, 1.0))


class TestRecurrentSet:
    def test_boundary_composition(self):
        target = recurrent_set(P1, 0.1)
        lo, hi = inner_radii_epsilon(P1, 0.1)
        assert target.r_i_minus_eps == lo
        assert target.r_i_plus_eps == hi
        assert target.r_a_eps == r_a_epsilon(P1, 0.1)

    def test_ordering_invariants(self):
        radii = inner_radii(P1)
        for eps in (0.02, 0.05, 0.1):
            t = recurrent_set(P1, eps)
            assert radii.r_i_minus < t.r_i_minus_eps <= t.r_i_plus_eps < radii.r_i_plus
            assert t.r_a_eps > P1.r_d

    def test_monotone_in_eps(self):
        t1 = recurrent_set(P1, 0.02)
        t2 = recurrent_set(P1, 0.05)
        assert t1.r_i_minus_eps < t2.r_i_minus_eps
        assert t1.r_i_plus_eps > t2.r_i_plus_eps
        assert t1.r_a_eps < t2.r_a_eps

    def test_membership_examples(self):
        for variant in ("full-annulus", "strict-theta"):
            t = recurrent_set(P1, 0.1, variant)
            assert bool(t.contains(10.0, math.pi / 2))
        assert bool(recurrent_set(P1, 0.1).contains(9.9, 3 * math.pi / 2))
        assert not bool(recurrent_set(P1, 0.1, "strict-theta").contains(9.9, 3 * math.pi / 2))

    def test_contains_vectorized(self):
        t = recurrent_set(P1, 0.1)
        r = np.array([0.5, 9.9, 12.0])
        th = np.array([3 * math.pi / 2, 1.0, 1.0])
        assert list(t.contains(r, th)) == [True, True, False]

    def test_eps_at_epsilon_max_allowed(self):
        t = recurrent_set(P1, epsilon_max(P1))
        assert t.r_a_eps > 10.0

    def test_eps_above_epsilon_max_rejected(self):
        with pytest.raises(NoSolutionError, match="epsilon_max"):
            recurrent_set(P1, 0.2)

    def test_unknown_variant(self):
        with pytest.raises(ValueError, match="variant"):
            recurrent_set(P1, 0.05, "annulus")
        with pytest.raises(ValueError, match="variant"):
            RecurrentSet(0.05, 1.0, 9.0, 10.0, variant="annulus")


class TestRecurrenceBound:
    def test_reference_value(self):
        expected = (abs(15.0 - math.sqrt(99.0)) + TWO_PI) / 0.1
        bound, inside = recurrence_bound(P1, 0.1, 15.0, 0.0)
        assert not inside
        assert bound == pytest.approx(expected, rel=1e-12)
        assert bound == pytest.approx(113.33, abs=5e-3)

    def test_from_singular_radius(self):
        # r_s sits inside the full-annulus outer piece, so the formula value
        # 2*pi/(V*eps) is reached through the strict-theta variant (theta0 = 0
        # is outside its theta-interval)
        bound, inside = recurrence_bound(P1, 0.05, P1.r_s, 0.0, variant="strict-theta")
        assert not inside
        assert bound == pytest.approx(TWO_PI / (P1.V * 0.05), rel=1e-12)
        bound_full, inside_full = recurrence_bound(P1, 0.05, P1.r_s, 0.0)
        assert inside_full and bound_full == 0.0

    def test_inverse_in_eps(self):
        b1, _ = recurrence_bound(P1, 0.05, 15.0, 0.0)
        b2, _ = recurrence_bound(P1, 0.1, 15.0, 0.0)
        assert b1 == pytest.approx(2.0 * b2, rel=1e-12)

    def test_start_inside_flagged(self):
        bound, inside = recurrence_bound(P1, 0.1, 10.0, math.pi / 2)
        assert inside
        assert bound == 0.0


class TestGridCheck:
    # full-resolution scans run in the acceptance suite; this is a coarse smoke
    def test_full_annulus_clean_and_strict_dirty(self):
        res = generator_grid_check(P1, 0.05, dr=0.05, dtheta=0.02)
        assert res.n_violations == 0
        assert res.n_outside > 50_000
        strict = generator_grid_check(P1, 0.05, variant="strict-theta", dr=0.05, dtheta=0.02)
        assert strict.n_violations > 0
        assert strict.n_positive > 0
        # reported rows carry (r, theta, LV) with LV above the margin
        r, th, lv = strict.violations[0]
        assert lv > -0.05
        assert lv == pytest.approx(generator_lyapunov(P1, r, th), rel=1e-12)
