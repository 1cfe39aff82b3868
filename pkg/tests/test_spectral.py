import numpy as np
import pytest
from numpy.testing import assert_allclose

import tcm2d as t
from tcm2d.errors import BadParams, NonZeroMean

from conftest import band_state, rel_l2


def sin_field(grid, kx=1, ky=0):
    X, Y = grid.meshgrid()
    a = 2.0 * np.pi / grid.length
    return t.SpectralField.from_phys(grid, np.sin(a * (kx * X + ky * Y)))


class TestGrid:
    def test_rejects_odd_or_tiny(self):
        with pytest.raises(BadParams):
            t.Grid(7)
        with pytest.raises(BadParams):
            t.Grid(6)
        with pytest.raises(BadParams):
            t.Grid(32, length=0.0)

    def test_zero_mode_wavenumber(self):
        g = t.Grid(16, length=3.5)
        assert g.kx[0, 0] == 0.0 and g.ky[0, 0] == 0.0

    def test_equality(self):
        assert t.Grid(16) == t.Grid(16)
        assert t.Grid(16) != t.Grid(16, length=1.0)


class TestFieldRepresentations:
    @pytest.mark.parametrize("n", [32, 64])
    def test_roundtrip(self, n):
        s = band_state(n=n, seed=1, hi=n // 3)
        f = s.theta
        back = t.SpectralField.from_spec(f.grid, f.spec).phys
        assert rel_l2(t.SpectralField.from_phys(f.grid, back), f) < 1e-12

    def test_conjugate_symmetry(self):
        f = band_state(n=32, seed=2).theta
        c = f.spec
        assert np.max(np.abs(c - np.conj(np.flip(np.roll(c, -1, (0, 1)), (0, 1))))) < 1e-9 * np.max(
            np.abs(c)
        )

    def test_mean_tracking(self):
        g = t.Grid(16)
        f = t.SpectralField.from_phys(g, np.full((16, 16), 2.5))
        assert abs(f.mean - 2.5) < 1e-14
        assert abs(t.SpectralField.from_spec(g, f.spec).mean - 2.5) < 1e-14


class TestDerivative:
    def test_eigenfunction(self):
        for L in (2.0 * np.pi, 3.0):
            g = t.Grid(32, length=L)
            f = sin_field(g)
            X, _ = g.meshgrid()
            expected = (2 * np.pi / L) * np.cos(2 * np.pi * X / L)
            assert_allclose(t.derivative(f, "x").phys, expected, atol=1e-12)
            assert abs(t.derivative(f, "x").mean) < 1e-14

    def test_constant(self):
        g = t.Grid(16)
        f = t.SpectralField.from_phys(g, np.full((16, 16), 4.0))
        assert t.norm(t.derivative(f, "x"), "L2") < 1e-13

    def test_bad_axis(self):
        g = t.Grid(16)
        with pytest.raises(BadParams):
            t.derivative(t.SpectralField.zeros(g), "z")

    def test_fd4_oracle(self):
        # 4th-order central differences on the same samples, error O(h^4)
        errs = []
        for n in (64, 128):
            th = band_state(n=n, seed=3, lo=1, hi=6).theta
            h = th.grid.spacing
            p = th.phys
            fd = (-np.roll(p, -2, 0) + 8 * np.roll(p, -1, 0) - 8 * np.roll(p, 1, 0) + np.roll(p, 2, 0)) / (12 * h)
            errs.append(np.max(np.abs(t.derivative(th, "x").phys - fd)))
        assert errs[0] / errs[1] > 8.0  # at least something like h^3..h^4
        assert errs[1] < 1e-4

    def test_mixed_partials_commute(self):
        f = band_state(n=32, seed=4).theta
        a = t.derivative(t.derivative(f, "x"), "y").spec
        b = t.derivative(t.derivative(f, "y"), "x").spec
        assert np.array_equal(a, b)


class TestInverseLaplacian:
    def test_eigenfunction(self):
        L = 3.0
        g = t.Grid(32, length=L)
        f = sin_field(g)
        out = t.inv_neg_laplacian(f)
        assert_allclose(out.phys, (L / (2 * np.pi)) ** 2 * f.phys, atol=1e-12)

    def test_zero(self):
        g = t.Grid(16)
        assert t.norm(t.inv_neg_laplacian(t.SpectralField.zeros(g)), "L2") == 0.0

    def test_forward_check(self):
        f = band_state(n=64, seed=5).theta
        g = t.inv_neg_laplacian(f)
        assert rel_l2(-1.0 * t.laplacian(g), f) < 1e-12
        assert abs(g.mean) < 1e-14

    def test_nonzero_mean_rejected(self):
        g = t.Grid(16)
        f = t.SpectralField.from_phys(g, np.ones((16, 16)))
        with pytest.raises(NonZeroMean):
            t.inv_neg_laplacian(f)


class TestGradInvNegLaplacian:
    def test_single_mode(self):
        L = 2.0 * np.pi
        g = t.Grid(32, length=L)
        theta = sin_field(g)
        phi = t.grad_inv_neg_laplacian(theta)
        X, _ = g.meshgrid()
        assert_allclose(phi.x.phys, np.cos(X), atol=1e-12)
        assert t.norm(phi.y, "L2") < 1e-13

    def test_zero(self):
        g = t.Grid(16)
        phi = t.grad_inv_neg_laplacian(t.SpectralField.zeros(g))
        assert t.norm(phi, "L2") == 0.0

    def test_divergence_recovers_negated_input(self):
        # div(grad((-lap)^{-1} theta)) = lap((-lap)^{-1} theta) = -theta
        theta = band_state(n=64, seed=6).theta
        phi = t.grad_inv_neg_laplacian(theta)
        assert rel_l2(t.div(phi), -1.0 * theta) < 1e-12


class TestRieszDouble:
    def test_single_mode_multiplier(self):
        g = t.Grid(64)
        f = sin_field(g, kx=1, ky=0)
        assert rel_l2(t.riesz_double("x", "x", f), -1.0 * f) < 1e-12

    def test_symmetry(self):
        f = band_state(n=32, seed=7).theta
        a = t.riesz_double("x", "y", f).spec
        b = t.riesz_double("y", "x", f).spec
        assert np.array_equal(a, b)

    def test_trace_identity(self):
        f = band_state(n=64, seed=8).theta
        total = t.riesz_double("x", "x", f) + t.riesz_double("y", "y", f)
        assert rel_l2(total, -1.0 * f) < 1e-12

    def test_annihilates_mean(self):
        g = t.Grid(16)
        f = t.SpectralField.from_phys(g, np.full((16, 16), 3.0))
        assert t.norm(t.riesz_double("x", "x", f), "L2") < 1e-13


class TestLerayProjection:
    def test_annihilates_gradients(self):
        f = band_state(n=32, seed=9).theta
        p = t.leray_project(t.grad(f))
        assert t.norm(p, "L2") < 1e-12 * max(t.norm(t.grad(f), "L2"), 1.0)

    def test_fixed_point_on_solenoidal(self):
        u = band_state(n=32, seed=10).u
        assert rel_l2(t.leray_project(u), u) < 1e-12

    def test_divergence_free_output(self):
        s = band_state(n=64, seed=11)
        a = t.VectorField(s.theta, s.v.x)  # generic, not solenoidal
        p = t.leray_project(a)
        assert t.norm(t.div(p), "L2") < 1e-12 * t.norm(a, "H1")

    def test_idempotent(self):
        s = band_state(n=32, seed=12)
        a = t.VectorField(s.v.x, s.theta)
        once = t.leray_project(a)
        twice = t.leray_project(once)
        assert rel_l2(twice, once) < 1e-13

    def test_self_adjoint(self):
        sa = band_state(n=32, seed=13)
        sb = band_state(n=32, seed=14)
        a = t.VectorField(sa.v.x, sa.theta)
        b = t.VectorField(sb.v.x, sb.theta)
        lhs = t.inner(t.leray_project(a), b)
        rhs = t.inner(a, t.leray_project(b))
        assert abs(lhs - rhs) < 1e-12 * t.norm(a, "L2") * t.norm(b, "L2")

    def test_preserves_component_means(self):
        g = t.Grid(16)
        ax = t.SpectralField.from_phys(g, 1.5 + np.zeros((16, 16)))
        ay = t.SpectralField.from_phys(g, -0.5 + np.zeros((16, 16)))
        p = t.leray_project(t.VectorField(ax, ay))
        assert abs(p.x.mean - 1.5) < 1e-14
        assert abs(p.y.mean + 0.5) < 1e-14


class TestDealias:
    def test_low_mode_unchanged(self):
        g = t.Grid(64)
        f = sin_field(g, kx=1, ky=0)
        assert rel_l2(t.dealias(f), f) < 1e-14

    def test_high_mode_zeroed(self):
        g = t.Grid(64)
        f = sin_field(g, kx=30, ky=0)  # 30 > 64/3
        assert t.norm(t.dealias(f), "L2") < 1e-13

    def test_idempotent_bit_exact(self):
        f = band_state(n=32, seed=15).theta
        once = t.dealias(f)
        twice = t.dealias(once)
        assert np.array_equal(once.spec, twice.spec)

    def test_cutoff_boundary(self):
        g = t.Grid(64)  # cutoff keeps max |k| <= 21
        keep = sin_field(g, kx=21, ky=0)
        drop = sin_field(g, kx=22, ky=0)
        assert rel_l2(t.dealias(keep), keep) < 1e-14
        assert t.norm(t.dealias(drop), "L2") < 1e-13


class TestNorms:
    def test_constant_l2(self):
        for L in (2.0 * np.pi, 1.5):
            g = t.Grid(16, length=L)
            f = t.SpectralField.from_phys(g, np.full((16, 16), -3.0))
            assert abs(t.norm(f, "L2") - 3.0 * L) < 1e-12

    def test_sine_l2(self):
        g = t.Grid(32)
        f = sin_field(g)
        assert abs(t.norm(f, "L2") - np.sqrt(2.0) * np.pi) < 1e-12

    def test_parseval(self):
        f = band_state(n=64, seed=16).theta
        g = f.grid
        phys_quad = np.sqrt(np.sum(f.phys**2) * (g.length / g.n) ** 2)
        assert abs(t.norm(f, "L2") - phys_quad) < 1e-12 * phys_quad

    def test_l4_oversampled_quadrature_oracle(self):
        f = band_state(n=64, seed=17, lo=1, hi=10).theta
        g = f.grid
        factor = 4
        m = factor * g.n
        shifted = np.fft.fftshift(f.spec)
        big = np.zeros((m, m), dtype=complex)
        lo = (m - g.n) // 2
        big[lo : lo + g.n, lo : lo + g.n] = shifted
        fine = np.fft.ifft2(np.fft.ifftshift(big) * factor**2).real
        oracle = (np.sum(fine**4) * (g.length / m) ** 2) ** 0.25
        assert abs(t.norm(f, "L4") - oracle) < 1e-8 * oracle

    def test_h_norms(self):
        f = band_state(n=32, seed=18).theta
        h1 = np.sqrt(t.norm(f, "L2") ** 2 + t.norm(t.grad(f), "L2") ** 2)
        assert abs(t.norm(f, "H1") - h1) < 1e-12 * h1
        h2 = np.sqrt(h1**2 + t.norm(t.laplacian(f), "L2") ** 2)
        assert abs(t.norm(f, "H2") - h2) < 1e-12 * h2

    def test_vector_sums_component_squares(self):
        s = band_state(n=32, seed=19)
        v = s.v
        expect = np.hypot(t.norm(v.x, "L2"), t.norm(v.y, "L2"))
        assert abs(t.norm(v, "L2") - expect) < 1e-13

    def test_unknown_kind(self):
        g = t.Grid(16)
        with pytest.raises(BadParams):
            t.norm(t.SpectralField.zeros(g), "L3")


class TestSmoothingInverse:
    def test_constant_preserved(self):
        g = t.Grid(16)
        f = t.SpectralField.from_phys(g, np.full((16, 16), 7.0))
        assert_allclose(t.smoothing_inverse(f).phys, f.phys, atol=1e-12)

    def test_single_mode_halved(self):
        g = t.Grid(32)
        f = sin_field(g)
        assert_allclose(t.smoothing_inverse(f).phys, 0.5 * f.phys, atol=1e-12)

    def test_forward_check_and_contraction(self):
        f = band_state(n=64, seed=20).theta
        out = t.smoothing_inverse(f)
        recon = out - t.laplacian(out)
        assert rel_l2(recon, f) < 1e-12
        assert t.norm(out, "L2") <= t.norm(f, "L2")
