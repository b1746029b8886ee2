"""Tests for singwell.radial_solver.

Oracles:
* Sobolev constant -- hand closed form at N=4: S = 4*pi*sqrt(6)/3, and the
  function's own optimizer-family quadrature cross-check (raises above 1e-6).
* fibering_max -- dense 1e5-point ray scan, and the exact closed form for a
  pure-power nonlinearity F(s) = s^p / p.
* chain constants -- frozen precise values recomputed from the closed forms,
  validated against an independent scipy golden-section maximization of
  t^2/2 - M2 C A^(-beta) t^p, and against level_exponents for the growth
  exponent.
* margins -- seeded random smooth and rough profiles across A in {1,1e2,1e4}.
"""

import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from singwell.discretization import (
    BiradialProfile,
    RadialProfile,
    biradial_grid,
    norm_A,
    radial_grid,
)
from singwell.exponents import ProblemParams, critical_exponents, level_exponents
from singwell.nonlinearity import make_builtin, make_custom
from singwell.radial_solver import (
    FiberingResult,
    chain_constants,
    check_radial_bound,
    default_trial_family,
    estimate_mA,
    fibering_max,
    lower_bound_chain,
    sobolev_constant,
)


@pytest.fixture(scope="module")
def grid4():
    return radial_grid(N=4, r_max=12.0, n=512)


@pytest.fixture(scope="module")
def grid5():
    return radial_grid(N=5, r_max=12.0, n=512)


@pytest.fixture(scope="module")
def spec_a1():
    return make_builtin("MinPower", 2.5, 5.0)


@pytest.fixture(scope="module")
def spec_a3():
    return make_builtin("MinPower", 3.0, 6.0)


def random_smooth(grid, rng):
    vals = np.zeros_like(grid.r)
    for _ in range(int(rng.integers(1, 5))):
        c = rng.uniform(0.5, 4.0)
        s = rng.uniform(0.3, grid.r_max / 4.0)
        ctr = rng.uniform(0.0, grid.r_max / 3.0)
        vals += c * np.exp(-(((grid.r - ctr) / s) ** 2))
    return RadialProfile(grid=grid, values=vals)


def random_profiles(grid, rng, count):
    """Mix of smooth Gaussian combinations and rough positive noise."""
    out = []
    for trial in range(count):
        if trial % 3 == 2:
            out.append(
                RadialProfile(
                    grid=grid, values=np.abs(rng.normal(size=grid.r.size)) + 1e-3
                )
            )
        else:
            out.append(random_smooth(grid, rng))
    return out


class TestSobolevConstant:
    def test_hand_value_n4(self):
        # S = pi*N*(N-2)*(Gamma(N/2)/Gamma(N))^(2/N) = 8*pi/sqrt(6) at N=4
        expected = (4.0 * math.pi * math.sqrt(6.0) / 3.0) ** -0.5
        assert sobolev_constant(4) == pytest.approx(expected, rel=1e-12)

    def test_internal_cross_check_passes_and_decreasing(self):
        vals = [sobolev_constant(N) for N in (3, 4, 5, 6, 7, 10)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("bad", [2, 1, 0, -3])
    def test_invalid_dimension(self, bad):
        with pytest.raises(ValueError):
            sobolev_constant(bad)

    def test_non_integer_dimension(self):
        with pytest.raises(ValueError):
            sobolev_constant(4.5)


class TestFiberingMax:
    def test_against_dense_scan(self, grid4, spec_a1):
        gauss = RadialProfile(grid=grid4, values=np.exp(-(grid4.r**2)))
        fib = fibering_max(gauss, spec_a1, A=10.0, alpha=1.0)
        _, _, nsq = norm_A(gauss, 10.0, 1.0)
        w = grid4.quad_weights
        ts = np.geomspace(fib.t_u / 3.0, fib.t_u * 3.0, 100_000)
        g = np.array(
            [0.5 * t * t * nsq - float(np.sum(w * spec_a1.F(t * gauss.values))) for t in ts]
        )
        k = int(np.argmax(g))
        assert fib.max_value == pytest.approx(g[k], rel=1e-8)
        assert fib.t_u == pytest.approx(ts[k], rel=1e-4)
        assert 0 < k < len(ts) - 1

    def test_pure_power_closed_form(self, grid4):
        # F(s) = s^p / p gives t_u = (|u|_A^2 / int u^p)^(1/(p-2)) exactly
        p = 3.5
        spec = make_custom(lambda s: s ** (p - 1.0), lambda s: s**p / p, 2.5, 5.0)
        gauss = RadialProfile(grid=grid4, values=np.exp(-(grid4.r**2)))
        fib = fibering_max(gauss, spec, A=10.0, alpha=1.0)
        _, _, nsq = norm_A(gauss, 10.0, 1.0)
        int_p = float(np.sum(grid4.quad_weights * gauss.values**p))
        t_closed = (nsq / int_p) ** (1.0 / (p - 2.0))
        max_closed = (0.5 - 1.0 / p) * t_closed**2 * nsq
        assert fib.t_u == pytest.approx(t_closed, rel=1e-6)
        assert fib.max_value == pytest.approx(max_closed, rel=1e-12)

    def test_negative_profile_rejected(self, grid4, spec_a1):
        prof = RadialProfile(grid=grid4, values=-np.exp(-(grid4.r**2)))
        with pytest.raises(ValueError, match="nonnegative"):
            fibering_max(prof, spec_a1, A=1.0, alpha=1.0)

    def test_zero_profile_rejected(self, grid4, spec_a1):
        prof = RadialProfile(grid=grid4, values=np.zeros_like(grid4.r))
        with pytest.raises(ValueError, match="nonzero"):
            fibering_max(prof, spec_a1, A=1.0, alpha=1.0)

    def test_subquadratic_nonlinearity_fails_to_bracket(self, grid4):
        # F(s) = s^2/2 never overtakes the quadratic norm term: g(t) grows
        # forever and the bracketing must fail loudly.
        spec = make_custom(lambda s: s, lambda s: 0.5 * s * s, 2.5, 5.0)
        gauss = RadialProfile(grid=grid4, values=np.exp(-(grid4.r**2)))
        with pytest.raises(RuntimeError, match="superquadratic"):
            fibering_max(gauss, spec, A=10.0, alpha=1.0)

    def test_result_validation(self, grid4):
        prof = RadialProfile(grid=grid4, values=np.exp(-(grid4.r**2)))
        with pytest.raises(ValueError):
            FiberingResult(t_u=-1.0, max_value=1.0, profile=prof)
        with pytest.raises(ValueError):
            FiberingResult(t_u=math.inf, max_value=1.0, profile=prof)


class TestTrialFamilyAndEstimate:
    def test_family_shape(self, grid4):
        fam = default_trial_family(grid4, n_scales=6)
        # centered Gaussians + compact bumps + annular shells per scale
        assert len(fam) == 18
        for prof in fam:
            assert prof.grid is grid4
            assert np.all(prof.values >= 0.0)
            assert np.any(prof.values > 0.0)

    def test_empty_family_rejected(self, spec_a1):
        with pytest.raises(ValueError, match="nonempty"):
            estimate_mA([], spec_a1, A=1.0, alpha=1.0)

    def test_zero_member_rejected(self, grid4, spec_a1):
        zero = RadialProfile(grid=grid4, values=np.zeros_like(grid4.r))
        with pytest.raises(ValueError, match="zero energy norm"):
            estimate_mA([zero], spec_a1, A=1.0, alpha=1.0)

    @pytest.mark.parametrize("A", [1.0, 1e2, 1e4])
    def test_upper_estimate_sits_above_certified_floor(self, grid4, spec_a1, A):
        fam = default_trial_family(grid4)
        mA, desc = estimate_mA(fam, spec_a1, A, alpha=1.0)
        _, _, _, c0, m_exp = chain_constants(4, 1.0, 2.5, 5.0, spec_a1.M2, A)
        assert mA >= c0 * A**m_exp
        assert mA == desc["max_value"]
        assert 0 <= desc["index"] < desc["family_size"] == len(fam)
        assert desc["t_u"] > 0.0


class TestChainConstants:
    def test_frozen_values_alpha_below_two(self, spec_a1):
        p_used, lam, c_interp, c0, m_exp = chain_constants(
            4, 1.0, 2.5, 5.0, spec_a1.M2, 100.0
        )
        assert p_used == pytest.approx(2.8, abs=1e-12)
        assert lam == pytest.approx(0.0, abs=1e-15)
        assert m_exp == pytest.approx(3.0, abs=1e-12)
        assert c0 == pytest.approx(1.03598443726, rel=1e-9)

    def test_frozen_values_alpha_above_two(self, spec_a3):
        p_used, lam, c_interp, c0, m_exp = chain_constants(
            5, 3.0, 3.0, 6.0, spec_a3.M2, 100.0
        )
        assert p_used == pytest.approx(4.4, abs=1e-12)
        assert abs(lam) <= 1e-15
        assert m_exp == pytest.approx(4.0 / 3.0, rel=1e-12)
        assert c0 == pytest.approx(2.5867615016, rel=1e-9)

    def test_frozen_values_interior_lambda(self):
        spec = make_builtin("MinPower", 3.2, 5.0)
        p_used, lam, c_interp, c0, m_exp = chain_constants(
            4, 1.0, 3.2, 5.0, spec.M2, 100.0
        )
        assert p_used == pytest.approx(3.2, abs=1e-12)
        assert lam == pytest.approx(1.0 / 3.0, rel=1e-12)
        assert m_exp == pytest.approx(4.0 / 3.0, rel=1e-12)

    @pytest.mark.parametrize(
        "N,alpha,p1,p2,family",
        [(4, 1.0, 2.5, 5.0, "MinPower"), (5, 3.0, 3.0, 6.0, "MinPower")],
    )
    @pytest.mark.parametrize("A", [1.0, 1e4])
    def test_closed_form_max_matches_numeric_optimizer(self, N, alpha, p1, p2, family, A):
        spec = make_builtin(family, p1, p2)
        p_used, _, c_interp, c0, m_exp = chain_constants(N, alpha, p1, p2, spec.M2, A)
        beta = m_exp * (p_used - 2.0) / 2.0
        Y = spec.M2 * c_interp * A ** (-beta)
        res = minimize_scalar(
            lambda t: -(0.5 * t * t - Y * t**p_used),
            bracket=(1e-6, 1.0, 1e8),
            method="golden",
            options={"xtol": 1e-14},
        )
        assert -res.fun == pytest.approx(c0 * A**m_exp, rel=1e-12)

    def test_growth_exponent_matches_level_exponents(self):
        rng = np.random.default_rng(7)
        count = 0
        while count < 40:
            N = int(rng.integers(3, 11))
            if rng.random() < 0.5:
                alpha = float(rng.uniform(0.05, 1.95))
            else:
                alpha = float(rng.uniform(2.05, min(2.0 * N - 2.0, 6.0) - 0.05))
            ts = 2.0 * N / (N - 2.0)
            p1 = float(rng.uniform(2.01, ts - 0.01))
            p2 = float(rng.uniform(ts + 0.01, ts + 4.0))
            try:
                m_chain = chain_constants(N, alpha, p1, p2, 1.0, 1.0)[4]
                m_ref = level_exponents(N, alpha, p1, p2, 2)[0]
            except ValueError:
                continue
            assert m_chain == pytest.approx(m_ref, rel=1e-12, abs=1e-12)
            count += 1

    def test_modified_critical_gap_identity(self):
        # 2*_alpha - 2 == 4 alpha / (2N - 2 - alpha)
        rng = np.random.default_rng(11)
        for _ in range(20):
            N = int(rng.integers(3, 12))
            alpha = float(rng.uniform(0.05, 2.0 * N - 2.0 - 0.05))
            tsa = critical_exponents(N, alpha).two_star_alpha
            assert tsa - 2.0 == pytest.approx(
                4.0 * alpha / (2.0 * N - 2.0 - alpha), abs=1e-12
            )

    def test_validation(self):
        with pytest.raises(ValueError, match="alpha != 2"):
            chain_constants(4, 2.0, 2.5, 5.0, 1.0, 1.0)
        with pytest.raises(ValueError, match="alpha < 2N-2"):
            chain_constants(4, 6.0, 2.5, 5.0, 1.0, 1.0)
        with pytest.raises(ValueError, match="p1"):
            chain_constants(4, 1.0, 4.5, 5.0, 1.0, 1.0)  # p1 >= 2* = 4
        with pytest.raises(ValueError, match="p2"):
            chain_constants(5, 3.0, 2.5, 3.0, 1.0, 1.0)  # p2 <= 2* = 10/3


class TestLowerBoundChain:
    @pytest.mark.parametrize("A", [1.0, 1e2, 1e4])
    def test_margins_alpha_below_two(self, grid4, spec_a1, A):
        rng = np.random.default_rng(42)
        for prof in random_profiles(grid4, rng, 12):
            params = ProblemParams(N=4, alpha=1.0, A=A, K=2, p1=2.5, p2=5.0)
            cert = lower_bound_chain(prof, params, spec_a1)
            for name, margin in cert.margins.items():
                assert margin >= -1e-8, f"{name} margin {margin} at A={A}"

    @pytest.mark.parametrize("A", [1.0, 1e2, 1e4])
    def test_margins_alpha_above_two(self, grid5, spec_a3, A):
        rng = np.random.default_rng(43)
        for prof in random_profiles(grid5, rng, 12):
            params = ProblemParams(N=5, alpha=3.0, A=A, K=2, p1=3.0, p2=6.0)
            cert = lower_bound_chain(prof, params, spec_a3)
            for name, margin in cert.margins.items():
                assert margin >= -1e-8, f"{name} margin {margin} at A={A}"

    def test_certificate_fields(self, grid4, spec_a1):
        rng = np.random.default_rng(5)
        prof = random_smooth(grid4, rng)
        params = ProblemParams(N=4, alpha=1.0, A=50.0, K=2, p1=2.5, p2=5.0)
        cert = lower_bound_chain(prof, params, spec_a1)
        assert 0.0 <= cert.lambda_interp <= 1.0
        assert cert.C0 > 0.0
        assert cert.A == 50.0
        assert cert.S_N == sobolev_constant(4)
        assert set(cert.margins) == {
            "modified_critical",
            "sobolev",
            "interpolation",
            "fibering_floor",
        }

    def test_dimension_mismatch_rejected(self, grid5, spec_a1):
        prof = RadialProfile(grid=grid5, values=np.exp(-(grid5.r**2)))
        params = ProblemParams(N=4, alpha=1.0, A=1.0, K=2, p1=2.5, p2=5.0)
        with pytest.raises(ValueError, match="does not match"):
            lower_bound_chain(prof, params, spec_a1)

    def test_zero_profile_rejected(self, grid4, spec_a1):
        prof = RadialProfile(grid=grid4, values=np.zeros_like(grid4.r))
        params = ProblemParams(N=4, alpha=1.0, A=1.0, K=2, p1=2.5, p2=5.0)
        with pytest.raises(ValueError, match="nonzero"):
            lower_bound_chain(prof, params, spec_a1)

    def test_biradial_profile_rejected(self, spec_a1):
        bg = biradial_grid(N=4, K=2, s_max=5.0, t_max=5.0, n_s=16, n_t=16)
        prof = BiradialProfile(grid=bg, values=np.ones(bg.shape))
        params = ProblemParams(N=4, alpha=1.0, A=1.0, K=2, p1=2.5, p2=5.0)
        with pytest.raises(TypeError, match="radial"):
            lower_bound_chain(prof, params, spec_a1)


class TestCheckRadialBound:
    @pytest.mark.parametrize("A", [1.0, 1e2, 1e4])
    def test_margins_nonnegative_on_random_set(self, grid4, A):
        rng = np.random.default_rng(42)
        for prof in random_profiles(grid4, rng, 12):
            margin, worst_r = check_radial_bound(prof, A, alpha=1.0)
            assert margin >= 0.0
            assert worst_r in grid4.r

    def test_zero_profile_vacuous(self, grid4):
        prof = RadialProfile(grid=grid4, values=np.zeros_like(grid4.r))
        margin, worst_r = check_radial_bound(prof, 10.0, 1.0)
        assert margin == 1.0
        assert math.isnan(worst_r)

    def test_alpha_range_validated(self, grid4):
        prof = RadialProfile(grid=grid4, values=np.exp(-(grid4.r**2)))
        with pytest.raises(ValueError, match="2N-2"):
            check_radial_bound(prof, 1.0, alpha=6.0)

    def test_biradial_profile_rejected(self):
        bg = biradial_grid(N=4, K=2, s_max=5.0, t_max=5.0, n_s=16, n_t=16)
        prof = BiradialProfile(grid=bg, values=np.ones(bg.shape))
        with pytest.raises(TypeError, match="radial"):
            check_radial_bound(prof, 1.0, 1.0)
