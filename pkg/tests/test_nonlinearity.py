"""Tests for the nonlinearity families and the sampled assumption checkers.

Oracle values: closed-form evaluations frozen by hand; primitives are
cross-checked against scipy's adaptive quadrature as an independent oracle.
"""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from singwell.nonlinearity import (
    check_assumptions,
    find_mu,
    make_builtin,
    make_custom,
)

ALL_FAMILIES = ("MinPower", "RationalQuotient", "RationalDerivative")


def all_specs(p1=2.5, p2=5.0):
    return [make_builtin(fam, p1, p2) for fam in ALL_FAMILIES]


class TestConstruction:
    def test_min_power_point_values(self):
        mp = make_builtin("MinPower", 2.5, 5.0)
        assert mp.f(1.0) == pytest.approx(1.0)
        assert mp.f(2.0) == pytest.approx(2.0**1.5, rel=1e-15)
        assert mp.F(1.0) == pytest.approx(0.2, rel=1e-15)

    def test_rational_quotient_point_value(self):
        rq = make_builtin("RationalQuotient", 2.5, 5.0)
        assert rq.f(1.0) == pytest.approx(0.5, rel=1e-15)

    def test_defaults_theta_and_mu(self):
        for spec in all_specs():
            assert spec.theta == pytest.approx(2.5)
            assert spec.mu == pytest.approx(6.0)

    def test_family_name_normalization(self):
        assert make_builtin("min_power", 2.5, 5.0).family == "MinPower"
        assert make_builtin("rational-quotient", 2.5, 5.0).family == "RationalQuotient"

    def test_rejects_bad_exponents(self):
        with pytest.raises(ValueError):
            make_builtin("MinPower", 2.0, 5.0)
        with pytest.raises(ValueError):
            make_builtin("MinPower", 3.0, 3.0)
        with pytest.raises(ValueError):
            make_builtin("NoSuchFamily", 2.5, 5.0)

    def test_truncation_is_exact(self):
        for spec in all_specs():
            s = np.array([-10.0, -1.0, -1e-12, 0.0])
            assert np.all(spec.f(s) == 0.0)
            assert np.all(spec.F(s) == 0.0)
            assert spec.f(-3.0) == 0.0 and spec.F(-3.0) == 0.0


class TestPrimitiveAccuracy:
    @pytest.mark.parametrize("s_query", [1e-5, 1e-2, 0.5, 1.0, 3.0, 50.0, 1e4])
    def test_rational_quotient_primitive_vs_adaptive_quadrature(self, s_query):
        rq = make_builtin("RationalQuotient", 2.5, 5.0)
        exact, _ = quad(lambda t: t**4 / (1 + t**2.5), 0, s_query,
                        epsabs=1e-16, epsrel=1e-13, limit=400)
        assert rq.F(s_query) == pytest.approx(exact, rel=1e-12)

    @pytest.mark.parametrize("p1,p2", [(2.2, 4.0), (3.0, 6.0), (2.8, 9.0)])
    def test_rational_quotient_primitive_other_exponents(self, p1, p2):
        rq = make_builtin("RationalQuotient", p1, p2)
        for s_query in (1e-3, 0.7, 12.0, 1e5):
            exact, _ = quad(lambda t: t ** (p2 - 1) / (1 + t ** (p2 - p1)), 0, s_query,
                            epsabs=1e-16, epsrel=1e-13, limit=400)
            assert rq.F(s_query) == pytest.approx(exact, rel=1e-11)

    def test_primitive_derivative_matches_f(self):
        s = np.geomspace(1e-3, 1e3, 200)
        h = s * 1e-6
        for spec in all_specs():
            dF = (spec.F(s + h) - spec.F(s - h)) / (2 * h)
            rel = np.max(np.abs(dF - spec.f(s)) / np.abs(spec.f(s)))
            assert rel < 1e-8, spec.family

    def test_fprime_matches_difference_quotient(self):
        s = np.geomspace(1e-2, 1e2, 100)
        h = s * 1e-6
        for spec in all_specs():
            df = (spec.f(s + h) - spec.f(s - h)) / (2 * h)
            mask = np.abs(s - 1.0) > 1e-3  # MinPower has a kink at s = 1
            rel = np.max(np.abs(df - spec.fprime(s))[mask] / np.abs(spec.fprime(s))[mask])
            assert rel < 1e-7, spec.family


class TestAssumptionChecks:
    def test_all_builtins_pass_all_five(self):
        for spec in all_specs():
            report = check_assumptions(spec)
            assert report.passed, {c.name: c.passed for c in report.checks}
            assert len(report.checks) == 5

    @pytest.mark.parametrize("p1,p2", [(2.2, 4.0), (3.0, 6.0), (2.5, 5.0)])
    def test_builtins_pass_across_exponents(self, p1, p2):
        for fam in ALL_FAMILIES:
            assert check_assumptions(make_builtin(fam, p1, p2)).passed

    def test_inflated_theta_fails_superquadratic_above_one(self):
        mp = make_builtin("MinPower", 2.5, 5.0)
        report = check_assumptions(mp.with_theta(4.0))
        check = {c.name: c for c in report.checks}["superquadratic"]
        assert not check.passed
        assert all(s > 1.0 for s in check.violating_s)

    def test_pure_power_fails_envelope_below_one(self):
        pp = make_custom(lambda s: s**1.5, lambda s: s**2.5 / 2.5, p1=2.5, p2=5.0)
        report = check_assumptions(pp)
        check = {c.name: c for c in report.checks}["double_power_envelope"]
        assert not check.passed
        assert all(s < 1.0 for s in check.violating_s)

    def test_deflated_mu_fails_normalized_primitive(self):
        mp = make_builtin("MinPower", 2.5, 5.0)
        report = check_assumptions(mp.with_mu(3.0))  # below p2 = 5
        check = {c.name: c for c in report.checks}["normalized_primitive_decreasing"]
        assert not check.passed

    def test_sample_count_precondition(self):
        with pytest.raises(ValueError):
            check_assumptions(make_builtin("MinPower", 2.5, 5.0), sample_count=100)

    def test_report_serializes(self):
        report = check_assumptions(make_builtin("MinPower", 2.5, 5.0))
        d = report.as_dict()
        assert d["passed"] is True
        assert {c["name"] for c in d["checks"]} == {
            "double_power_envelope", "superquadratic", "positive_primitive",
            "slope_ratio_increasing", "normalized_primitive_decreasing",
        }


class TestStructuralProperties:
    def test_primitive_scaling_lower_bound(self):
        """F(ts) >= t^mu F(s) for t in [0,1] - the scaling property the path
        upper bound uses."""
        t = np.linspace(0.01, 1.0, 50)[:, None]
        s = np.geomspace(1e-3, 1e3, 50)[None, :]
        for spec in all_specs():
            assert np.all(spec.F(t * s) >= t**spec.mu * spec.F(s) * (1 - 1e-12))

    def test_primitive_theta_power_comparison(self):
        """The superquadratic condition forces F(s) <= F(1) s^theta below 1
        and F(s) >= F(1) s^theta above 1."""
        for spec in all_specs():
            s_low = np.geomspace(1e-4, 1.0, 50)
            s_high = np.geomspace(1.0, 1e4, 50)
            F1 = spec.F(1.0)
            assert np.all(spec.F(s_low) <= F1 * s_low**spec.theta * (1 + 1e-12))
            assert np.all(spec.F(s_high) >= F1 * s_high**spec.theta * (1 - 1e-12))

    def test_find_mu_matches_the_supercritical_power(self):
        # f s / F tends to p2 at 0 for all three families, so the minimal
        # safe mu is p2 (up to the reported safety margin).
        for spec in all_specs():
            assert find_mu(spec) == pytest.approx(spec.p2, rel=1e-4)

    @given(
        p1=st.floats(min_value=2.1, max_value=3.4),
        dp=st.floats(min_value=0.3, max_value=6.0),
        s=st.floats(min_value=1e-5, max_value=1e5),
    )
    @settings(max_examples=150, deadline=None)
    def test_min_power_envelope_is_tight(self, p1, dp, s):
        spec = make_builtin("MinPower", p1, p1 + dp)
        env = min(s ** (p1 - 1.0), s ** (p1 + dp - 1.0))
        assert spec.f(s) <= env * (1 + 1e-12)
        assert spec.f(s) >= env * (1 - 1e-12)  # MinPower IS its own envelope

    @given(s=st.floats(min_value=1e-6, max_value=1e6))
    @settings(max_examples=200, deadline=None)
    def test_families_are_ordered_at_each_point(self, s):
        mp, rq, rd = all_specs()
        # the quotient family is dominated by the min family pointwise
        assert rq.f(s) <= mp.f(s) * (1 + 1e-12)
        assert rq.f(s) > 0 and rd.f(s) > 0 and mp.f(s) > 0
