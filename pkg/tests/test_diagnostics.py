import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bo2d import EquationParams, Grid2D, SolveSchedule, evolve, fit_decay, gronwall_envelope
from bo2d import j_integral, norms, transform
from bo2d.diagnostics import (
    WeightedBound,
    boundary_strip_fraction,
    calibrate_gronwall,
    calibrate_weighted_bound,
    homogeneous_sobolev_norm,
    j_closed_form_p2,
    sobolev_norm,
    spectral_shell_fraction,
    weighted_norm,
    xs_norm,
)
from bo2d.experiments import dx_gaussian, gaussian
from bo2d.inequalities import random_smooth_field
from oracles import gaussian_l2, gaussian_weighted_l2, j_closed_form

seeds = st.integers(0, 10_000)


class TestNorms:
    def test_single_sine(self):
        g = Grid2D(32, 32, math.pi, math.pi)
        X, _ = g.mesh()
        s = 3.0
        rep = norms(transform(np.sin(X), g), EquationParams(s=s), lp=(2, 4, math.inf))
        assert rep.l2 == pytest.approx(math.sqrt(2 * math.pi**2), rel=1e-12)
        assert rep.hs == pytest.approx(2 ** (s / 2) * rep.l2, rel=1e-12)
        assert rep.lp[2.0] == pytest.approx(rep.l2, rel=1e-12)
        assert rep.lp[math.inf] == pytest.approx(1.0, rel=1e-12)
        assert rep.linf == pytest.approx(1.0, rel=1e-12)
        assert rep.w1inf == pytest.approx(2.0, rel=1e-12)
        # ∂_x^{-1} sin x = -cos x, same H^s norm
        assert rep.xs == pytest.approx(2 * rep.hs, rel=1e-12)

    def test_zero(self):
        g = Grid2D(16, 16, 1.0, 1.0)
        rep = norms(transform(np.zeros(g.shape), g), lp=(3,), thetas=(0.5, 1.0), l1_sobolev=True)
        values = [rep.l2, rep.hs, rep.xs, rep.linf, rep.w1inf, rep.gronwall_integrand, rep.lp[3.0],
                  rep.weighted[0.5], rep.weighted[1.0], rep.l11, rep.l1_grad, rep.xmean]
        assert all(v == 0 for v in values)

    def test_gaussian_closed_forms(self):
        g = Grid2D(256, 256, 12.0, 12.0)
        rep = norms(gaussian(g), thetas=(0.0, 1.0))
        assert rep.l2 == pytest.approx(gaussian_l2(), abs=1e-8)
        assert rep.linf == pytest.approx(1.0, abs=1e-12)
        assert rep.weighted[1.0] == pytest.approx(gaussian_weighted_l2(), abs=1e-8)
        assert rep.weighted[0.0] == rep.l2

    def test_xs_flag_for_nonzero_xmean(self):
        g = Grid2D(64, 64, 10.0, 10.0)
        assert norms(gaussian(g)).xs is None
        assert norms(dx_gaussian(g)).xs is not None

    def test_gronwall_integrand(self):
        g = Grid2D(32, 32, math.pi, math.pi)
        X, Y = g.mesh()
        u = transform(2 * np.sin(X) * np.cos(Y), g)
        rep = norms(u, EquationParams(p=3))
        assert rep.gronwall_integrand == pytest.approx(2.0 * 2.0**2, rel=1e-12)

    def test_l1_functionals(self):
        g = Grid2D(256, 256, 12.0, 12.0)
        rep = norms(gaussian(g), l1_sobolev=True)
        # ∫ e^{-r²/2} = 2π and ∫ |∇ e^{-r²/2}| = ∫ r e^{-r²/2} = (2π)^{3/2}/2; |∇u| has a
        # cone point at the origin, which limits the cell-sum accuracy
        assert rep.l1_grad == pytest.approx(2 * math.pi + (2 * math.pi) ** 1.5 / 2, rel=1e-4)
        assert rep.l11 > 0

    @given(seeds)
    def test_nonnegative_finite(self, seed):
        u = random_smooth_field(seed, Grid2D(16, 16, 2.0, 2.0), 3.0)
        rep = norms(u, lp=(1, 4), thetas=(0.5,), l1_sobolev=True)
        vals = [rep.l2, rep.hs, rep.linf, rep.w1inf, rep.gronwall_integrand, *rep.lp.values(),
                *rep.weighted.values(), rep.l11, rep.l1_grad]
        assert all(math.isfinite(v) and v >= 0 for v in vals)


class TestSobolev:
    @given(seeds)
    def test_h0_is_l2(self, seed):
        u = random_smooth_field(seed, Grid2D(16, 16, 2.0, 2.0), 3.0)
        assert sobolev_norm(u, 0.0) == pytest.approx(norms(u).l2, rel=1e-12)

    @given(seeds)
    def test_monotone_in_s(self, seed):
        u = random_smooth_field(seed, Grid2D(16, 16, 2.0, 2.0), 3.0)
        vals = [sobolev_norm(u, s) for s in (0, 1, 2, 3)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    @given(seeds)
    def test_log_convex(self, seed):
        u = random_smooth_field(seed, Grid2D(16, 16, 2.0, 2.0), 3.0)
        h0, h1, h2 = (sobolev_norm(u, s) for s in (0, 1, 2))
        assert h1**2 <= h0 * h2 * (1 + 1e-10)

    def test_homogeneous_kills_constants(self):
        g = Grid2D(16, 16, 1.0, 1.0)
        assert homogeneous_sobolev_norm(transform(np.full(g.shape, 4.0), g), 2.0) == 0.0

    def test_xs_definition(self):
        g = Grid2D(64, 64, 10.0, 10.0)
        u = dx_gaussian(g)
        from bo2d.spectral import inv_dx

        assert xs_norm(u, 3.0) == pytest.approx(sobolev_norm(u, 3.0) + sobolev_norm(inv_dx(u), 3.0))


class TestWeighted:
    def test_theta_zero_is_l2(self):
        u = random_smooth_field(1, Grid2D(32, 32, 3.0, 3.0), 3.0)
        assert weighted_norm(u, 0.0) == norms(u).l2

    def test_increasing_in_theta(self):
        u = random_smooth_field(2, Grid2D(32, 32, 3.0, 3.0), 3.0)
        vals = [weighted_norm(u, th) for th in (0.0, 0.25, 0.5, 1.0)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))


class TestFitDecay:
    def test_exact_power_law(self):
        ts = np.linspace(1, 20, 30)
        fit = fit_decay([(t, 5 / t) for t in ts])
        assert fit.exponent == pytest.approx(-1.0, abs=1e-10)
        assert fit.amplitude == pytest.approx(5.0, rel=1e-10)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_constant_series(self):
        fit = fit_decay([(t, 3.0) for t in np.linspace(1, 5, 10)])
        assert fit.exponent == pytest.approx(0.0, abs=1e-12)
        assert 0.0 <= fit.r_squared <= 1.0

    def test_modulated_power_law(self):
        ts = np.linspace(10, 100, 200)
        fit = fit_decay([(t, (1 + 0.1 * math.sin(t)) / t) for t in ts], (10, 100))
        assert fit.exponent == pytest.approx(-1.0, abs=0.02)

    def test_window_selects(self):
        ts = np.linspace(1, 100, 100)
        series = [(t, t**-2 if t < 50 else t**-1) for t in ts]
        assert fit_decay(series, (1, 45)).exponent == pytest.approx(-2.0, abs=1e-10)

    def test_insufficient_samples(self):
        with pytest.raises(ValueError, match="insufficient samples"):
            fit_decay([(t, 1 / t) for t in range(1, 8)])

    def test_nonpositive(self):
        with pytest.raises(ValueError, match="nonpositive"):
            fit_decay([(t, 1 / t - 0.2) for t in range(1, 12)])

    def test_bad_window(self):
        with pytest.raises(ValueError, match="window"):
            fit_decay([(t, 1 / t) for t in range(1, 12)], (5, 5))

    @given(st.floats(-3, 3), st.floats(0.1, 10))
    def test_recovers_any_exponent(self, k, a):
        ts = np.geomspace(1, 50, 12)
        fit = fit_decay([(t, a * t**k) for t in ts])
        assert fit.exponent == pytest.approx(k, abs=1e-9)
        assert 0 <= fit.r_squared <= 1


class TestJIntegral:
    def test_zero_time(self):
        assert all(j_integral(0.0, p) == 0.0 for p in (1, 2, 3, 5))

    def test_p2_example(self):
        assert j_integral(10.0, 2) == pytest.approx(22 * math.log(11) / 12, abs=1e-10)
        assert j_closed_form_p2(10.0) == pytest.approx(4.3962, abs=1e-4)

    @pytest.mark.parametrize("t", [1.0, 10.0, 100.0, 1e4])
    @pytest.mark.parametrize("p", [1, 2])
    def test_closed_forms(self, t, p):
        assert j_integral(t, p) == pytest.approx(j_closed_form(t, p), abs=1e-10 * max(1, j_closed_form(t, p)))

    def test_p3_bounded(self):
        a, b = j_integral(1e3, 3), j_integral(1e4, 3)
        assert abs(b / a - 1) < 0.05 and a < 10 and b < 10

    def test_p2_grows(self):
        assert j_integral(1e4, 2) / j_integral(1e3, 2) > 1.2

    def test_against_plain_quadrature(self):
        from scipy.integrate import quad

        for p in (3, 4):
            t = 7.5
            ref, _ = quad(lambda s: 1 / ((1 + t - s) * (1 + s) ** (p - 1)), 0, t, epsabs=1e-13)
            assert j_integral(t, p) == pytest.approx((1 + t) * ref, abs=1e-10)

    def test_invalid(self):
        with pytest.raises(ValueError):
            j_integral(-1.0, 2)
        with pytest.raises(ValueError):
            j_integral(1.0, 0)


class TestGronwall:
    def setup_method(self):
        self.g = Grid2D(32, 32, 2 * math.pi, 2 * math.pi)

    def test_zero_solution(self):
        z = transform(np.zeros(self.g.shape), self.g)
        traj = evolve(z, EquationParams(p=3), SolveSchedule(0.5, 0.1))
        _, env, meas = gronwall_envelope(traj, 1.0)
        assert np.all(env == 0) and np.all(meas == 0)

    def test_linear_run(self):
        phi = dx_gaussian(self.g, 1.0, 1.5)
        traj = evolve(phi, EquationParams(p=2), SolveSchedule(1.0, 0.1), nonlinear=False)
        hs0 = traj.diagnostics[0].hs
        _, env, meas = gronwall_envelope(traj, 0.0)
        assert np.all(env == hs0)
        assert np.abs(meas / hs0 - 1).max() <= 1e-12

    def test_calibration_holds_on_window(self):
        phi = dx_gaussian(self.g, 1.0, 1.5)
        traj = evolve(phi, EquationParams(p=1), SolveSchedule(1.0, 0.02, 5))
        c = calibrate_gronwall(traj, 1.0)
        times, env, meas = gronwall_envelope(traj, c)
        assert np.all(meas <= env * (1 + 1e-12))


class TestWeightedCalibration:
    def test_bound_holds_on_calibration_window(self):
        t = np.linspace(0, 1, 21)
        w = np.sqrt(1 + 3 * t + t**2)
        b = calibrate_weighted_bound(t, w, 1.0, 0.5)
        sel = t <= 0.5
        assert np.all(w[sel] <= b(t[sel]) * (1 + 1e-12))

    def test_rate_no_worse_than_known_pair(self):
        # (A, B) = (0.7, 0) is admissible for W² = W0² + 0.7 t M², so the chosen
        # pair has initial growth rate at most 0.7 M²
        t = np.linspace(0, 1, 11)
        w = np.sqrt(4 + t * 0.7 * 2.0**2)
        b = calibrate_weighted_bound(t, w, 2.0, 0.25)
        assert 2 * b.B * 4 + b.A * 4 <= 0.7 * 4 * (1 + 1e-6)
        sel = t <= 0.25
        assert np.all(w[sel] <= b(t[sel]) * (1 + 1e-12))

    def test_pure_exponential_growth(self):
        t = np.linspace(0, 1, 11)
        b = calibrate_weighted_bound(t, 3 * np.exp(0.4 * t), 1.0, 0.5)
        assert b.w0 == 3.0
        assert np.all(3 * np.exp(0.4 * t[t <= 0.5]) <= b(t[t <= 0.5]) * (1 + 1e-12))

    def test_decreasing_series(self):
        t = np.linspace(0, 1, 11)
        b = calibrate_weighted_bound(t, 2 - t, 1.0, 0.25)
        assert (b.A, b.B) == (0.0, 0.0)

    def test_needs_samples(self):
        with pytest.raises(ValueError):
            calibrate_weighted_bound([0.0, 1.0], [1.0, 1.0], 1.0, 0.5)

    def test_call(self):
        b = WeightedBound(A=2.0, B=0.5, w0=1.0, xs_max=1.0)
        assert b(1.0) == pytest.approx(math.exp(0.5) * math.sqrt(3.0))


class TestHealthChecks:
    def test_boundary_strip(self):
        g = Grid2D(128, 128, 20.0, 20.0)
        assert boundary_strip_fraction(gaussian(g)) < 1e-12
        assert boundary_strip_fraction(gaussian(g, center=(19.0, 0.0))) > 0.1
        assert boundary_strip_fraction(transform(np.zeros(g.shape), g)) == 0.0

    def test_shell_fraction(self):
        g = Grid2D(64, 64, 20.0, 20.0)
        assert spectral_shell_fraction(gaussian(g)) < 1e-4
        X, _ = g.mesh()
        top = transform(np.cos(30 * math.pi * X / 20.0), g)
        assert spectral_shell_fraction(top) == pytest.approx(1.0)
