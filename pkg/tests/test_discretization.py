"""Tests for grids, quadrature, norms, energies, gradients and the
radial/nonradial splitter.

Independent oracles: scipy adaptive quadrature for weighted 1D integrals,
closed-form moment formulas for monomials, and exact scaling laws.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import quad

from singwell.discretization import (
    BiradialProfile,
    RadialProfile,
    biradial_grid,
    energy_and_gradient,
    lift_radial,
    norm_A,
    radial_grid,
    radialize,
    sphere_area,
)
from singwell.nonlinearity import make_builtin


class TestSphereArea:
    def test_known_areas(self):
        assert sphere_area(2) == pytest.approx(2 * math.pi, rel=1e-15)
        assert sphere_area(3) == pytest.approx(4 * math.pi, rel=1e-15)
        assert sphere_area(4) == pytest.approx(2 * math.pi**2, rel=1e-15)


class TestRadialGrid:
    def test_measure_integral_exact(self):
        for N in (4, 5, 6, 7):
            g = radial_grid(N, r_max=10.0, n=512)
            exact = sphere_area(N) * (g.r_max**N - g.r_min**N) / N
            assert float(g.quad_weights.sum()) == pytest.approx(exact, rel=1e-8)

    def test_weights_positive_nodes_increasing(self):
        g = radial_grid(5, r_max=20.0, n=1024)
        assert np.all(g.quad_weights > 0)
        assert np.all(np.diff(g.r) > 0)
        assert g.r[0] > 0

    def test_monomials_integrate_exactly(self):
        g = radial_grid(5, r_max=10.0, n=512)
        for a in range(5):
            got = float(g.quad_weights @ g.r**a)
            exact = sphere_area(5) * (g.r_max ** (5 + a) - g.r_min ** (5 + a)) / (5 + a)
            assert got == pytest.approx(exact, rel=1e-13)

    def test_default_origin_margin(self):
        g = radial_grid(4, r_max=20.0, n=64)
        assert g.r_min == pytest.approx(2e-5)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            radial_grid(2, r_max=10.0)
        with pytest.raises(ValueError):
            radial_grid(4, r_max=-1.0)
        with pytest.raises(ValueError):
            radial_grid(4, r_max=10.0, n=4)


class TestBiradialGrid:
    @pytest.mark.parametrize("N,K", [(4, 2), (5, 2), (5, 3), (6, 2), (6, 4), (8, 4), (10, 2)])
    def test_weights_positive_and_monomials_exact(self, N, K):
        bg = biradial_grid(N, K, s_max=7.0, t_max=9.0, n_s=64, n_t=48)
        assert bg.s_weights.min() > 0 and bg.t_weights.min() > 0
        for a in range(5):
            for b in range(5):
                got = float((bg.s_weights @ bg.s**a) * (bg.t_weights @ bg.t**b))
                exact = (
                    sphere_area(K) * 7.0 ** (K + a) / (K + a)
                    * sphere_area(N - K) * 9.0 ** (N - K + b) / (N - K + b)
                )
                assert got == pytest.approx(exact, rel=1e-10)

    def test_no_node_on_axes(self):
        bg = biradial_grid(5, 2, s_max=8.0, t_max=8.0, n_s=32, n_t=32)
        assert bg.s.min() > 0 and bg.t.min() > 0
        assert float(bg.rho.min()) > 0

    def test_ball_sector_mass(self):
        """The grid reproduces the mass of the ball {|x| <= R}: the t-factor
        is integrated in closed form per column (the measure is monomial), the
        s-factor by the grid weights, isolating weight correctness from
        lattice-boundary cancellation noise."""
        N, K, R = 5, 2, 6.0
        bg = biradial_grid(N, K, s_max=8.0, t_max=8.0, n_s=256, n_t=256)
        NK = N - K
        t_cap = np.sqrt(np.clip(R * R - bg.s**2, 0.0, None))
        column = sphere_area(NK) * np.minimum(t_cap, 8.0) ** NK / NK
        got = float(bg.s_weights @ column)
        ball = math.pi ** (N / 2) / math.gamma(N / 2 + 1) * R**N
        assert got == pytest.approx(ball, rel=1e-6)
        # the all-lattice version agrees at its own (boundary-limited) rate
        lattice = float(bg.quad_weights[bg.rho <= R].sum())
        assert lattice == pytest.approx(ball, rel=5e-3)

    def test_offset_span(self):
        bg = biradial_grid(5, 2, s_max=9.0, t_max=7.0, n_s=32, n_t=32, s_min=3.0, t_min=2.0)
        assert bg.s.min() > 3.0 and bg.t.min() > 2.0
        got = float(bg.s_weights.sum())
        exact = sphere_area(2) * (9.0**2 - 3.0**2) / 2
        assert got == pytest.approx(exact, rel=1e-12)

    def test_rejects_bad_split(self):
        with pytest.raises(ValueError):
            biradial_grid(4, 3, s_max=8.0, t_max=8.0)
        with pytest.raises(ValueError):
            biradial_grid(4, 1, s_max=8.0, t_max=8.0)


class TestNormA:
    def test_zero_profile(self):
        g = radial_grid(4, r_max=10.0, n=128)
        z = RadialProfile(g, np.zeros(g.size))
        assert norm_A(z, 1.0, 1.0) == (0.0, 0.0, 0.0)

    def test_quadratic_scaling(self):
        g = radial_grid(4, r_max=10.0, n=256)
        u = RadialProfile.from_callable(g, lambda r: np.exp(-(r**2)))
        g1, p1, n1 = norm_A(u, 1.0, 1.0)
        c = 3.7
        g2, p2, n2 = norm_A(RadialProfile(g, c * u.values), 1.0, 1.0)
        assert g2 == pytest.approx(c**2 * g1, rel=1e-12)
        assert p2 == pytest.approx(c**2 * p1, rel=1e-12)
        assert n2 == pytest.approx(c**2 * n1, rel=1e-12)

    def test_gaussian_against_adaptive_quadrature(self):
        """Radial u = exp(-r^2), N=4, alpha=1, A=1 on [1e-4, 10]."""
        g = radial_grid(4, r_max=10.0, n=8192, r_min=1e-4)
        u = RadialProfile.from_callable(g, lambda r: np.exp(-(r**2)))
        grad_part, pot_part, norm_sq = norm_A(u, A=1.0, alpha=1.0)
        grad_exact = quad(
            lambda r: 4 * r * r * np.exp(-2 * r * r) * sphere_area(4) * r**3, 0, 10,
            epsabs=1e-14,
        )[0]
        pot_exact = quad(
            lambda r: np.exp(-2 * r * r) * sphere_area(4) * r**2, 0, 10, epsabs=1e-14
        )[0]
        assert grad_part == pytest.approx(grad_exact, rel=1e-6)
        assert pot_part == pytest.approx(pot_exact, rel=1e-8)
        assert norm_sq == pytest.approx(grad_part + pot_part, rel=1e-15)
        # the gradient part has the closed form pi^2 as R -> infinity
        assert grad_part == pytest.approx(math.pi**2, rel=2e-6)

    def test_biradial_scale_covariance(self):
        """u_lambda(x) = u(x/lambda) on the lambda-scaled grid: the gradient
        part scales as lambda^(N-2), the potential part as lambda^(N-alpha),
        exactly (to rounding) by construction."""
        N, K, lam, alpha = 5, 2, 1.7, 2.3
        bg1 = biradial_grid(N, K, s_max=8.0, t_max=8.0, n_s=48, n_t=48)
        bg2 = biradial_grid(N, K, s_max=8.0 * lam, t_max=8.0 * lam, n_s=48, n_t=48)

        def u(s, t):
            return np.exp(-(s**2 + t**2)) * (1 + 0.3 * s * t)

        u1 = BiradialProfile.from_callable(bg1, u)
        u2 = BiradialProfile.from_callable(bg2, lambda s, t: u(s / lam, t / lam))
        g1, p1, _ = norm_A(u1, 1.0, alpha)
        g2, p2, _ = norm_A(u2, 1.0, alpha)
        assert g2 == pytest.approx(lam ** (N - 2) * g1, rel=1e-12)
        assert p2 == pytest.approx(lam ** (N - alpha) * p1, rel=1e-12)

    def test_potential_part_linear_in_A(self):
        bg = biradial_grid(4, 2, s_max=6.0, t_max=6.0, n_s=32, n_t=32)
        u = BiradialProfile.from_callable(bg, lambda s, t: np.exp(-(s**2 + t**2)))
        _, p1, _ = norm_A(u, 1.0, 1.5)
        _, p2, _ = norm_A(u, 100.0, 1.5)
        assert p2 == pytest.approx(100.0 * p1, rel=1e-14)


class TestEnergyAndGradient:
    def setup_method(self):
        self.spec = make_builtin("RationalDerivative", 2.5, 5.0)
        self.bg = biradial_grid(4, 2, s_max=8.0, t_max=8.0, n_s=48, n_t=48)

    def test_zero_profile(self):
        z = BiradialProfile(self.bg, np.zeros(self.bg.shape))
        I, grad, res = energy_and_gradient(z, self.spec, 1.0, 1.0)
        assert I == 0.0
        assert res == pytest.approx(0.0, abs=1e-14)

    def test_energy_splits_as_norm_minus_mass(self):
        u = BiradialProfile.from_callable(self.bg, lambda s, t: 2 * np.exp(-(s**2 + t**2)))
        I, _, _ = energy_and_gradient(u, self.spec, 2.0, 1.0)
        _, _, nsq = norm_A(u, 2.0, 1.0)
        mass = float(np.sum(self.bg.quad_weights * self.spec.F(u.values)))
        assert I == pytest.approx(0.5 * nsq - mass, rel=1e-14)

    def test_directional_derivative_second_order(self):
        """(I(u+hv) - I(u-hv)) / 2h matches <grad, v> at observed order >= 1.9."""
        rng = np.random.default_rng(7)
        S, T = self.bg.s[:, None], self.bg.t[None, :]
        u_vals = 3.0 * np.exp(-(S**2 + T**2))
        # positive envelope + mild jitter: a zero-mean random direction makes
        # the third derivative cancel and the h^2 term drown in rounding noise
        v_vals = 3.0 * np.exp(-0.5 * (S**2 + T**2)) * (0.7 + 0.3 * rng.random(self.bg.shape))
        u = BiradialProfile(self.bg, u_vals)
        _, grad, _ = energy_and_gradient(u, self.spec, 1.0, 1.0)
        pairing = float(np.sum(grad * v_vals))
        errs = []
        for h in (1e-4, 1e-5):
            Ip, _, _ = energy_and_gradient(BiradialProfile(self.bg, u_vals + h * v_vals), self.spec, 1.0, 1.0)
            Im, _, _ = energy_and_gradient(BiradialProfile(self.bg, u_vals - h * v_vals), self.spec, 1.0, 1.0)
            errs.append(abs((Ip - Im) / (2 * h) - pairing))
        order = math.log10(errs[0] / errs[1])
        assert order >= 1.9

    def test_residual_zero_iff_gradient_zero(self):
        z = BiradialProfile(self.bg, np.zeros(self.bg.shape))
        _, grad, res = energy_and_gradient(z, self.spec, 1.0, 1.0)
        assert np.all(grad == 0.0) and res <= 1e-14

    def test_energy_overflow_reported(self):
        u = BiradialProfile(self.bg, np.full(self.bg.shape, 1e130))
        with pytest.raises(FloatingPointError, match="diverged"):
            energy_and_gradient(u, make_builtin("MinPower", 2.5, 8.0), 1.0, 1.0)

    def test_small_norm_energy_positive(self):
        """Small profiles sit in the positivity well around zero."""
        rng = np.random.default_rng(3)
        for _ in range(5):
            vals = rng.standard_normal(self.bg.shape) * np.exp(
                -(self.bg.s[:, None] ** 2 + self.bg.t[None, :] ** 2)
            )
            u = BiradialProfile(self.bg, vals)
            _, _, nsq = norm_A(u, 1.0, 1.0)
            u_small = BiradialProfile(self.bg, vals * (0.01 / math.sqrt(nsq)))
            I, _, _ = energy_and_gradient(u_small, self.spec, 1.0, 1.0)
            assert I > 0.0

    def test_mesh_refinement_order(self):
        """Energy converges at observed order >= 1.8 under grid halving."""
        spec = self.spec

        def u(s, t):
            return 1.3 * np.exp(-(s**2 + t**2))

        vals = []
        for n in (24, 48, 96, 192):
            bg = biradial_grid(4, 2, s_max=8.0, t_max=8.0, n_s=n, n_t=n)
            I, _, _ = energy_and_gradient(BiradialProfile.from_callable(bg, u), spec, 1.0, 1.0)
            vals.append(I)
        e1 = abs(vals[0] - vals[3])
        e2 = abs(vals[1] - vals[3])
        order = math.log2(e1 / e2)
        assert order >= 1.8

    def test_energy_scaling_identity(self):
        """I(u_lambda) on the scaled grid equals
        lambda^(N-2)/2 grad + lambda^(N-alpha)/2 pot - lambda^N mass."""
        N, K, lam, alpha, A = 5, 2, 2.2, 1.4, 3.0
        bg1 = biradial_grid(N, K, s_max=7.0, t_max=7.0, n_s=40, n_t=40)
        bg2 = biradial_grid(N, K, s_max=7.0 * lam, t_max=7.0 * lam, n_s=40, n_t=40)

        def u(s, t):
            return 1.2 * np.exp(-(s**2 + t**2))

        u1 = BiradialProfile.from_callable(bg1, u)
        u2 = BiradialProfile.from_callable(bg2, lambda s, t: u(s / lam, t / lam))
        spec = self.spec
        gp, pp, _ = norm_A(u1, A, alpha)
        mass = float(np.sum(bg1.quad_weights * spec.F(u1.values)))
        predicted = 0.5 * lam ** (N - 2) * gp + 0.5 * lam ** (N - alpha) * pp - lam**N * mass
        I2, _, _ = energy_and_gradient(u2, spec, A, alpha)
        assert I2 == pytest.approx(predicted, rel=1e-6)


class TestRadialize:
    def setup_method(self):
        self.bg = biradial_grid(4, 2, s_max=6.0, t_max=6.0, n_s=96, n_t=96)

    def test_radial_input_has_tiny_nonradiality(self):
        u = BiradialProfile.from_callable(self.bg, lambda s, t: np.exp(-(s**2 + t**2)))
        _, nonrad = radialize(u)
        assert nonrad <= 1e-3

    def test_genuinely_nonradial_input(self):
        u = BiradialProfile.from_callable(self.bg, lambda s, t: s * np.exp(-(s**2 + t**2)))
        _, nonrad = radialize(u)
        assert nonrad > 0.1

    def test_projection_is_idempotent(self):
        u = BiradialProfile.from_callable(self.bg, lambda s, t: s * np.exp(-(s**2 + t**2)))
        first, _ = radialize(u)
        second, _ = radialize(lift_radial(u))
        assert np.max(np.abs(first.values - second.values)) <= 1e-12

    def test_zero_profile_defined_as_radial(self):
        z = BiradialProfile(self.bg, np.zeros(self.bg.shape))
        _, nonrad = radialize(z)
        assert nonrad == 0.0

    def test_radial_part_recovers_the_profile(self):
        u = BiradialProfile.from_callable(self.bg, lambda s, t: np.exp(-(s**2 + t**2)))
        radial_part, _ = radialize(u)
        expected = np.exp(-radial_part.grid.r**2)
        inside = radial_part.grid.r <= 4.0  # away from the sparse corner data
        err = np.max(np.abs(radial_part.values - expected)[inside])
        assert err <= 1e-3


class TestProfiles:
    def test_shape_mismatch_rejected(self):
        g = radial_grid(4, r_max=10.0, n=64)
        with pytest.raises(ValueError):
            RadialProfile(g, np.zeros(65))

    def test_nonfinite_rejected(self):
        bg = biradial_grid(4, 2, s_max=4.0, t_max=4.0, n_s=16, n_t=16)
        bad = np.zeros(bg.shape)
        bad[3, 3] = np.inf
        with pytest.raises(ValueError):
            BiradialProfile(bg, bad)
