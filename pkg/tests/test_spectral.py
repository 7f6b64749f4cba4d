import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bo2d import Grid2D, Multiplier, SpectralField, apply_multiplier, dealias_product, inv_dx
from bo2d import inverse_transform, make_grid, transform
from bo2d.evolution import project_zero_xmean
from bo2d.inequalities import random_smooth_field
from bo2d.spectral import (
    conjugate_symmetry_error,
    dx,
    dy,
    inner,
    l2_norm,
    padded_size,
    power,
    reflect,
)
from conftest import bandlimited, rel
from oracles import convolution_product

seeds = st.integers(0, 10_000)


class TestGrid:
    def test_unit_lattice(self):
        g = make_grid(8, 8, math.pi, math.pi)
        assert sorted(g.xi.tolist()) == list(range(-4, 4))
        assert sorted(g.eta.tolist()) == list(range(-4, 4))

    def test_spacings(self):
        g = make_grid(16, 8, 2 * math.pi, math.pi)
        assert np.allclose(np.diff(np.sort(g.xi)), 0.5)
        assert np.allclose(np.diff(np.sort(g.eta)), 1.0)

    def test_odd_size_rejected(self):
        with pytest.raises(ValueError, match="nx must be even"):
            make_grid(7, 8, 1, 1)

    @pytest.mark.parametrize("args", [(6, 8, 1, 1), (8, 4, 1, 1), (8, 8, 0, 1), (8, 8, 1, -2),
                                      (8, 8, float("nan"), 1)])
    def test_bad_sizes_and_lengths(self, args):
        with pytest.raises(ValueError):
            make_grid(*args)

    def test_points_cover_box(self):
        g = make_grid(8, 16, 2.0, 3.0)
        assert g.x[0] == -2.0 and math.isclose(g.x[-1] + g.dx, 2.0)
        assert g.y[0] == -3.0 and math.isclose(g.y[-1] + g.dy, 3.0)

    def test_lattice_symmetric_except_nyquist(self):
        g = make_grid(16, 8, 1.0, 1.0)
        j = set(g.jx.tolist())
        assert all(-k in j for k in j if k != -8)
        assert 8 not in j


class TestTransform:
    def test_round_trip_real(self, grid32):
        v = np.random.default_rng(0).normal(size=grid32.shape)
        assert rel(inverse_transform(transform(v, grid32)), v) <= 1e-12

    def test_round_trip_complex(self, grid32):
        rng = np.random.default_rng(1)
        v = rng.normal(size=grid32.shape) + 1j * rng.normal(size=grid32.shape)
        u = transform(v, grid32)
        assert not u.real
        assert rel(inverse_transform(u), v) <= 1e-12

    def test_constant_has_single_mode(self, grid32):
        c = transform(np.ones(grid32.shape), grid32).coeffs
        assert abs(c[0, 0]) > 0
        c[0, 0] = 0
        assert np.abs(c).max() <= 1e-14

    def test_constant_coefficient_value(self):
        # continuum normalization: ∫ 1 e^{-i0} / 2π over the box
        g = make_grid(8, 8, 2.0, 3.0)
        c = transform(np.ones(g.shape), g).coeffs
        assert c[0, 0] == pytest.approx(4 * 2.0 * 3.0 / (2 * math.pi), rel=1e-14)

    def test_parseval(self, grid32):
        v = np.random.default_rng(2).normal(size=grid32.shape)
        lhs = math.sqrt(np.sum(v**2) * grid32.cell_area)
        assert l2_norm(transform(v, grid32)) == pytest.approx(lhs, rel=1e-12)

    def test_shape_mismatch(self, grid32):
        with pytest.raises(ValueError, match="does not match"):
            transform(np.zeros((8, 8)), grid32)

    def test_real_field_is_conjugate_symmetric(self, grid32):
        u = transform(np.random.default_rng(3).normal(size=grid32.shape), grid32)
        assert conjugate_symmetry_error(u) <= 1e-12

    def test_rejects_nonfinite(self, grid32):
        c = np.zeros(grid32.shape, dtype=complex)
        c[1, 1] = np.nan
        with pytest.raises(ValueError, match="NaN"):
            SpectralField(grid32, c)

    def test_single_mode_position(self):
        # e^{iξx} with ξ = 1 lands on mode j = 1 under the e^{-ixξ} forward kernel
        g = make_grid(8, 8, math.pi, math.pi)
        X, _ = g.mesh()
        c = transform(np.exp(1j * X), g).coeffs
        k = np.unravel_index(np.argmax(np.abs(c)), c.shape)
        assert (g.jx[k[0]], g.jy[k[1]]) == (1, 0)

    @given(seeds)
    def test_round_trip_property(self, seed):
        g = Grid2D(16, 8, 1.5, 2.5)
        v = np.random.default_rng(seed).normal(size=g.shape)
        assert rel(inverse_transform(transform(v, g)), v) <= 1e-12

    @given(seeds)
    def test_parseval_property(self, seed):
        g = Grid2D(8, 16, 3.0, 1.0)
        v = np.random.default_rng(seed).normal(size=g.shape)
        lhs = math.sqrt(np.sum(v**2) * g.cell_area)
        assert l2_norm(transform(v, g)) == pytest.approx(lhs, rel=1e-12)


class TestMultipliers:
    def setup_method(self):
        self.g = make_grid(32, 16, math.pi, math.pi)
        self.X, self.Y = self.g.mesh()

    def test_hilbert_cos_is_sin(self):
        u = apply_multiplier(transform(np.cos(self.X), self.g), Multiplier.hilbert_x())
        assert rel(inverse_transform(u), np.sin(self.X)) <= 1e-12

    def test_hilbert_twice_is_minus_identity(self):
        f = project_zero_xmean(random_smooth_field(1, self.g, 3.0))
        H = Multiplier.hilbert_x()
        assert rel(apply_multiplier(apply_multiplier(f, H), H).coeffs, -f.coeffs) <= 1e-12

    def test_lambda_on_single_mode(self):
        s = 2.7
        u = apply_multiplier(transform(np.exp(1j * self.X), self.g), Multiplier.lambda_s(s))
        assert rel(inverse_transform(u), 2 ** (s / 2) * np.exp(1j * self.X)) <= 1e-12

    def test_lambda_values_real_and_at_least_one(self):
        m = Multiplier.lambda_s(1.3).evaluate(self.g)
        assert np.all(m.imag == 0) and np.all(m.real >= 1)

    @pytest.mark.parametrize("m", [Multiplier.hilbert_x(), Multiplier("inv_dx"),
                                   Multiplier.dispersion(0.7, 1.0, 0.5)])
    def test_zero_on_xi_zero_column(self, m):
        vals = m.evaluate(self.g)
        col = vals[self.g.jx == 0, :]
        if m.kind == "dispersion":
            assert np.all(col == 1)  # e^{-i 0 t}
        else:
            assert np.all(col == 0)

    def test_odd_symbols_vanish_on_nyquist(self):
        for kind in ("hilbert_x", "deriv_x", "inv_dx"):
            vals = Multiplier(kind).evaluate(self.g)
            assert np.all(vals[self.g.jx == -16, :] == 0)
        assert np.all(Multiplier("deriv_y").evaluate(self.g)[:, self.g.jy == -8] == 0)

    def test_reality_preserved(self):
        f = random_smooth_field(2, self.g, 3.0)
        for m in (Multiplier.hilbert_x(), Multiplier("inv_dx"), Multiplier("deriv_x"),
                  Multiplier("deriv_y"), Multiplier.lambda_s(2.0), Multiplier.dispersion(1.3)):
            out = apply_multiplier(f, m)
            assert out.real and conjugate_symmetry_error(out) <= 1e-12

    def test_custom_non_hermitian_drops_reality(self):
        f = random_smooth_field(2, self.g, 3.0)
        table = np.full(self.g.shape, 1j)
        assert not apply_multiplier(f, Multiplier("custom", table=table)).real

    def test_grid_mismatch(self):
        f = random_smooth_field(2, self.g, 3.0)
        with pytest.raises(ValueError):
            apply_multiplier(f, np.ones((8, 8)))

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown multiplier"):
            Multiplier("laplace")

    def test_derivatives(self):
        u = transform(np.sin(2 * self.X) * np.cos(self.Y), self.g)
        assert rel(inverse_transform(dx(u)), 2 * np.cos(2 * self.X) * np.cos(self.Y)) <= 1e-12
        assert rel(inverse_transform(dy(u)), -np.sin(2 * self.X) * np.sin(self.Y)) <= 1e-12

    def test_hilbert_skew_adjoint(self):
        f = project_zero_xmean(random_smooth_field(3, self.g, 3.0))
        h = project_zero_xmean(random_smooth_field(4, self.g, 3.0))
        H = Multiplier.hilbert_x()
        a = inner(apply_multiplier(f, H), h)
        b = -inner(f, apply_multiplier(h, H))
        assert abs(a - b) <= 1e-12 * l2_norm(f) * l2_norm(h)

    @given(seeds, st.floats(0.1, 5.0))
    def test_lambda_inverse(self, seed, s):
        f = random_smooth_field(seed, self.g, 3.0)
        back = apply_multiplier(apply_multiplier(f, Multiplier.lambda_s(s)), Multiplier.lambda_s(-s))
        assert rel(back.coeffs, f.coeffs) <= 1e-12


class TestInvDx:
    def setup_method(self):
        self.g = make_grid(32, 16, math.pi, math.pi)
        self.X, _ = self.g.mesh()

    def test_cos_to_sin(self):
        out = inv_dx(transform(np.cos(self.X), self.g))
        assert rel(inverse_transform(out), np.sin(self.X)) <= 1e-12

    def test_constant_to_zero(self):
        out = inv_dx(transform(np.full(self.g.shape, 3.0), self.g))
        assert np.all(out.coeffs == 0)

    def test_inverse_identity(self):
        f = bandlimited(self.g, 5, band=5, zero_xmean=True)
        assert rel(dx(inv_dx(f)).coeffs, f.coeffs) <= 1e-12

    def test_removes_x_mean(self):
        f = random_smooth_field(5, self.g, 3.0)
        back = dx(inv_dx(f))
        assert rel(back.coeffs, project_zero_xmean(f).coeffs) <= 1e-12


class TestDealiasing:
    def test_identity_factor(self, grid32, smooth32):
        one = transform(np.ones(grid32.shape), grid32)
        assert rel(dealias_product([smooth32, one]).coeffs, smooth32.coeffs) <= 1e-12

    def test_top_mode_square_not_wrapped(self):
        g = make_grid(16, 8, math.pi, math.pi)
        X, _ = g.mesh()
        n = g.nx // 2 - 1
        u = transform(np.exp(1j * n * X), g)
        out = dealias_product([u, u])
        # the true product sits at 2n, outside the lattice, so nothing survives
        assert np.abs(out.coeffs).max() <= 1e-14 * np.abs(u.coeffs).max()

    def test_bandlimited_matches_naive(self, grid32):
        f = bandlimited(grid32, 1, band=5)
        h = bandlimited(grid32, 2, band=5)
        naive = transform(inverse_transform(f) * inverse_transform(h), grid32)
        assert rel(dealias_product([f, h]).coeffs, naive.coeffs) <= 1e-12

    @pytest.mark.parametrize("degree", [2, 3, 4])
    def test_matches_brute_force_convolution(self, degree):
        g = make_grid(16, 8, math.pi, 1.7)
        fs = [random_smooth_field(k, g, 1.5) for k in range(degree)]
        # put energy on the Nyquist modes too
        for k, f in enumerate(fs):
            f.coeffs[g.nx // 2, :] = 0.3 * (k + 1)
            f.coeffs[:, g.ny // 2] = 0.2
            f.coeffs[g.nx // 2, g.ny // 2] = 0.1
        ref = convolution_product([f.coeffs for f in fs], g.dxi, g.deta)
        assert rel(dealias_product(fs).coeffs, ref) <= 1e-12

    def test_complex_matches_brute_force(self):
        g = make_grid(8, 16, 1.0, 2.0)
        rng = np.random.default_rng(4)
        fs = [transform(rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape), g) for _ in range(2)]
        ref = convolution_product([f.coeffs for f in fs], g.dxi, g.deta, real=False)
        assert rel(dealias_product(fs).coeffs, ref) <= 1e-12

    def test_power_matches_product(self, smooth32):
        assert rel(power(smooth32, 4).coeffs, dealias_product([smooth32] * 4).coeffs) <= 1e-12

    def test_padded_size(self):
        assert padded_size(32, 2) == 50
        assert padded_size(30, 4) == 76
        assert padded_size(8, 3) == 18

    def test_grid_mismatch(self, smooth32):
        other = random_smooth_field(1, make_grid(16, 16, 1, 1), 3.0)
        with pytest.raises(ValueError, match="grid mismatch"):
            dealias_product([smooth32, other])

    def test_degree_too_small(self, smooth32):
        with pytest.raises(ValueError):
            dealias_product([smooth32, smooth32, smooth32], d=2)

    @given(seeds, seeds)
    def test_commutative(self, a, b):
        g = make_grid(16, 16, 2.0, 2.0)
        f, h = random_smooth_field(a, g, 2.0), random_smooth_field(b, g, 2.0)
        assert rel(dealias_product([f, h]).coeffs, dealias_product([h, f]).coeffs) <= 1e-13


class TestFieldOps:
    def test_arithmetic(self, smooth32):
        two = smooth32 + smooth32
        assert rel(two.coeffs, (2 * smooth32).coeffs) == 0
        assert np.all((smooth32 - smooth32).coeffs == 0)

    def test_reflect_is_point_reflection(self, grid32, smooth32):
        v = inverse_transform(smooth32)
        w = inverse_transform(reflect(smooth32))
        idx = (-np.arange(32)) % 32
        assert rel(w, v[np.ix_(idx, idx)]) <= 1e-12

    def test_copy_is_independent(self, smooth32):
        c = smooth32.copy()
        c.coeffs[0, 1] += 1
        assert c.coeffs[0, 1] != smooth32.coeffs[0, 1]
