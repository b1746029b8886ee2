"""End-to-end release gate: nine numbered criteria, one verdict line each.

Each test exercises a full pipeline at its stated tolerance and runtime
budget, prints ``criterion <n>: PASS/FAIL -- <detail>``, and asserts the
verdict.  The conftest hook echoes all collected lines after the run.

The nine criteria:

1. exponent arithmetic reproduces hand-derived values to 1e-12 and the
   multiplicity count is >= 1 on 1000 random admissible draws;
2. reduced and direct integrals of the scaled profile agree to 1e-6;
3. the energy ratio grows linearly in A (finite ratio(A)/A limit) and
   crosses 1 at a finite A0 for every built-in nonlinearity;
4. the explicit path upper bound scales as A^c_exp (log-log slope within
   0.05) on one steep-potential and one shallow-potential instance;
5. every link of the radial lower-bound chain holds on randomized
   profiles, and the fibering maximum clears the explicit floor;
6. the pointwise radial decay bound holds at every node on the same set;
7. the mountain-pass solver converges on a 128^2 grid to a verified,
   genuinely nonradial solution whose level is stable under grid doubling;
8. the upper/lower level curves cross at a finite coupling A*, past which
   the symmetric solutions separate from the radial floor and differ
   across symmetry classes;
9. the discrete energy gradient passes a second-order finite-difference
   check.
"""

from __future__ import annotations

import math
import time

import numpy as np
from scipy.optimize import brentq

from singwell import (
    BiradialProfile,
    BumpSpec,
    ProblemParams,
    RadialProfile,
    biradial_grid,
    chain_constants,
    check_radial_bound,
    critical_exponents,
    direct_integrals,
    energy_and_gradient,
    level_exponents,
    lower_bound_chain,
    make_builtin,
    make_custom,
    mountain_pass_floor,
    mpa_solve,
    negative_energy_endpoint,
    nu_and_admissible_K,
    path_upper_bound,
    profile_distance,
    radial_grid,
    ratio_and_A0,
    reduced_integrals,
    separation_check,
    solve_well_scaled,
    verify_solution,
)
from singwell.cli import fit_slope

VERDICT_LINES: list[str] = []


def _verdict(idx: int, ok: bool, detail: str, t0: float, budget: float) -> None:
    """Record and assert one criterion verdict (result and runtime budget)."""
    elapsed = time.perf_counter() - t0
    in_budget = elapsed < budget
    verdict = "PASS" if (ok and in_budget) else "FAIL"
    line = (
        f"criterion {idx}: {verdict} -- {detail}"
        f" [{elapsed:.1f}s, budget {budget:.0f}s"
        f"{'' if in_budget else ', OVER BUDGET'}]"
    )
    VERDICT_LINES.append(line)
    print(line)
    assert ok and in_budget, line


# --------------------------------------------------------------------------
# 1. exponent arithmetic (hand values to 1e-12; nu >= 1 on random draws)
# --------------------------------------------------------------------------


def test_01_exponent_arithmetic():
    t0 = time.perf_counter()
    checks: list[bool] = []

    nu, K_list = nu_and_admissible_K(4, 1.0, 2.5, 5.0)
    checks.append(nu == 1 and K_list == (2,))
    nu, K_list = nu_and_admissible_K(6, 1.0, 2.2, 4.0)
    checks.append(nu == 3 and K_list == (2, 3, 4))
    nu, K_list = nu_and_admissible_K(5, 3.0, 3.0, 6.0)
    checks.append(nu == 2 and K_list == (2, 3))

    t41 = critical_exponents(4, 1.0)
    checks.append(abs(t41.two_star - 4.0) <= 1e-12)
    checks.append(abs(t41.p1_star - 26.0 / 9.0) <= 1e-12)
    t53 = critical_exponents(5, 3.0)
    checks.append(abs(t53.two_star - 10.0 / 3.0) <= 1e-12)
    checks.append(abs(t53.p2_star - 3.6) <= 1e-12)

    m_exp, c_exp, gap = level_exponents(5, 3.0, 3.0, 6.0, K=2)
    checks.append(abs(m_exp - 4.0 / 3.0) <= 1e-12)
    checks.append(abs(c_exp - 0.5) <= 1e-12)
    checks.append(abs(gap - 5.0 / 6.0) <= 1e-12)
    m_exp, c_exp, gap = level_exponents(4, 1.0, 2.5, 5.0, K=2)
    checks.append(abs(m_exp - 3.0) <= 1e-12)
    checks.append(abs(c_exp - 2.5) <= 1e-12)
    checks.append(abs(gap - 0.5) <= 1e-12)

    # multiplicity property: nu >= 1 on 1000 random admissible draws,
    # 500 per potential-power branch
    rng = np.random.default_rng(0)
    n_draws = 0
    min_nu = 10**9
    for _ in range(500):  # shallow branch: alpha < 2, p1 below its threshold
        N = int(rng.integers(4, 11))
        lo = 2.0 / (N - 1.0)
        alpha = lo + (2.0 - lo) * rng.uniform(0.05, 0.95)
        table = critical_exponents(N, alpha)
        p1 = 2.0 + (min(table.p1_star, table.two_star) - 2.0) * rng.uniform(0.05, 0.95)
        p2 = table.two_star + 1.0
        nu, _ = nu_and_admissible_K(N, alpha, p1, p2)
        min_nu = min(min_nu, nu)
        n_draws += 1
    for _ in range(500):  # steep branch: alpha > 2, p2 above its threshold
        N = int(rng.integers(4, 11))
        alpha = 2.0 + (2.0 * N - 4.0) * rng.uniform(0.05, 0.95)
        table = critical_exponents(N, alpha)
        p1 = 0.5 * (2.0 + table.two_star)
        p2 = table.p2_star + rng.uniform(0.05, 10.0)
        nu, _ = nu_and_admissible_K(N, alpha, p1, p2)
        min_nu = min(min_nu, nu)
        n_draws += 1
    checks.append(n_draws == 1000 and min_nu >= 1)

    _verdict(
        1,
        all(checks),
        f"hand values to 1e-12; min nu over {n_draws} admissible draws = {min_nu}",
        t0,
        budget=1.0,
    )


# --------------------------------------------------------------------------
# 2. change-of-variables identities: reduced vs direct integrals
# --------------------------------------------------------------------------


def test_02_reduced_vs_direct_integrals():
    t0 = time.perf_counter()
    spec = make_builtin("MinPower", 2.5, 5.0)
    bump = BumpSpec()
    worst = 0.0
    for N, K, alpha in ((4, 2, 1.0), (5, 2, 3.0), (6, 3, 1.0)):
        for eps in (1.0, 0.5, 0.25, 0.1):
            red = reduced_integrals(bump, spec, N, K, alpha, eps)
            direct = direct_integrals(bump, spec, N, K, alpha, eps)
            for a, b in zip(red, direct):
                worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
    _verdict(
        2,
        worst <= 1e-6,
        f"worst relative gap {worst:.2e} <= 1e-6 over 3 instances x 4 epsilon",
        t0,
        budget=60.0,
    )


# --------------------------------------------------------------------------
# 3. energy-ratio divergence: finite ratio(A)/A limit, finite onset A0
# --------------------------------------------------------------------------


def test_03_energy_ratio_divergence():
    t0 = time.perf_counter()
    bump = BumpSpec()
    details = []
    ok = True
    for family in ("MinPower", "RationalQuotient", "RationalDerivative"):
        spec = make_builtin(family, 2.5, 5.0)
        ratios, A0 = ratio_and_A0(bump, spec, 4, 2, 1.0, (1.5, 1e6, 1e8))
        per_a = ratios / np.array([1.5, 1e6, 1e8])
        variation = abs(per_a[2] - per_a[1]) / per_a[1]
        ok = ok and variation < 0.05 and math.isfinite(A0)
        details.append(f"{family}: var {variation:.2%}, A0 {A0:g}")
    _verdict(3, ok, "; ".join(details), t0, budget=60.0)


# --------------------------------------------------------------------------
# 4. path-upper-bound scaling: log-log slope within 0.05 of c_exp
# --------------------------------------------------------------------------


def test_04_path_bound_scaling():
    t0 = time.perf_counter()
    bump = BumpSpec()
    ok = True
    details = []
    for N, K, alpha, p1, p2 in ((4, 2, 1.0, 2.5, 5.0), (5, 2, 3.0, 3.0, 6.0)):
        spec = make_builtin("MinPower", p1, p2)
        _, c_exp, _ = level_exponents(N, alpha, p1, p2, K)
        points = [
            (A, path_upper_bound(bump, spec, N, K, alpha, A)[1])
            for A in np.geomspace(1e2, 1e6, 5)
        ]
        slope, _stderr = fit_slope(points)
        ok = ok and abs(slope - c_exp) <= 0.05
        details.append(f"(N={N},alpha={alpha:g}): slope {slope:.4f} vs {c_exp:g}")
    _verdict(4, ok, "; ".join(details), t0, budget=120.0)


# --------------------------------------------------------------------------
# shared randomized radial profile set for criteria 5 and 6
# --------------------------------------------------------------------------


def _random_radial_profiles() -> list[RadialProfile]:
    """100 sums of 1-3 Gaussians on a radial grid (deterministic seed)."""
    rng = np.random.default_rng(0)
    grid = radial_grid(4, 30.0, 512)
    profiles = []
    for _ in range(100):
        values = np.zeros_like(grid.r)
        for _ in range(int(rng.integers(1, 4))):
            c = rng.uniform(0.0, 20.0)
            w = rng.uniform(0.5, 4.0)
            a = rng.uniform(0.2, 2.0)
            values += a * np.exp(-(((grid.r - c) / w) ** 2))
        profiles.append(RadialProfile(grid=grid, values=values))
    return profiles


def test_05_lower_bound_chain():
    t0 = time.perf_counter()
    spec = make_builtin("MinPower", 2.5, 5.0)
    profiles = _random_radial_profiles()
    worst_margin = math.inf
    worst_floor = math.inf
    for A in (1.0, 1e2, 1e4):
        params = ProblemParams(N=4, alpha=1.0, A=A, K=2, p1=2.5, p2=5.0)
        for profile in profiles:
            cert = lower_bound_chain(profile, params, spec)
            worst_margin = min(worst_margin, min(cert.margins.values()))
            worst_floor = min(worst_floor, cert.margins["fibering_floor"])
    ok = worst_margin >= -1e-8 and worst_floor >= 0.0
    _verdict(
        5,
        ok,
        f"worst link margin {worst_margin:.3g} >= -1e-8; "
        f"worst fibering-floor margin {worst_floor:.3g} >= 0 "
        f"(300 profile/A combinations)",
        t0,
        budget=120.0,
    )


def test_06_pointwise_decay_bound():
    t0 = time.perf_counter()
    profiles = _random_radial_profiles()
    worst = math.inf
    for A in (1.0, 1e2, 1e4):
        for profile in profiles:
            margin, _r = check_radial_bound(profile, A, 1.0)
            worst = min(worst, margin)
    _verdict(
        6,
        worst >= 0.0,
        f"worst nodal decay margin {worst:.3f} >= 0 (300 profile/A combinations)",
        t0,
        budget=60.0,
    )


# --------------------------------------------------------------------------
# 7. mountain-pass solve: converged, verified, nonradial, grid-stable
# --------------------------------------------------------------------------


def test_07_mountain_pass_solve():
    t0 = time.perf_counter()
    spec = make_builtin("MinPower", 2.5, 5.0)
    params = ProblemParams(N=4, alpha=1.0, A=100.0, K=2, p1=2.5, p2=5.0)
    levels = {}
    checks: list[bool] = []
    detail = ""
    for n in (128, 256):
        grid = biradial_grid(
            N=4, K=2, s_max=10.0, t_max=10.0, n_s=n, n_t=n
        )
        ubar = negative_energy_endpoint(grid, spec, params.A, params.alpha)
        record = mpa_solve(
            ubar, spec, params, tol=1e-6, max_iter=4000, n_starts=2, seed=0
        )
        levels[n] = record.level
        if n == 128:
            floor = mountain_pass_floor(grid, spec, params)["provable_floor"]
            straight = float(record.path_max_history[0])
            verification = verify_solution(record, spec, params, n_tests=20, seed=0)
            checks += [
                record.converged,
                record.residual < 1e-6,
                floor < record.level <= straight * (1.0 + 1e-12),
                verification["passed"],
                record.nonradiality > 0.1,
            ]
            detail = (
                f"level {record.level:.6g} in (floor {floor:.4g}, "
                f"straight-path bound {straight:.4g}], residual "
                f"{record.residual:.1e}, nonradiality {record.nonradiality:.3f}"
            )
        else:
            checks.append(record.converged)
    doubling = abs(levels[256] - levels[128]) / levels[128]
    checks.append(doubling < 0.02)
    _verdict(
        7,
        all(checks),
        f"{detail}; grid-doubling change {doubling:.2%} < 2%",
        t0,
        budget=600.0,
    )


# --------------------------------------------------------------------------
# 8. level separation past the crossover coupling A*
# --------------------------------------------------------------------------


def test_08_level_separation():
    t0 = time.perf_counter()
    spec = make_builtin("MinPower", 3.0, 6.0)
    bump = BumpSpec()
    _, _, _, c0, m_exp = chain_constants(5, 3.0, 3.0, 6.0, spec.M2, 100.0)
    checks: list[bool] = []
    details = []
    profiles: dict[int, BiradialProfile] = {}
    metric_A = None
    for K in (2, 3):

        def log_gap(x: float, K: int = K) -> float:
            A = math.exp(x)
            c_bound = path_upper_bound(bump, spec, 5, K, 3.0, A)[1]
            return math.log(c_bound) - math.log(c0 * A**m_exp)

        A_star = math.exp(brentq(log_gap, math.log(1e2), math.log(1e30), xtol=1e-10))
        checks.append(math.isfinite(A_star) and A_star > 0.0)

        A = 100.0 * A_star
        params = ProblemParams(N=5, alpha=3.0, A=A, K=K, p1=3.0, p2=6.0)
        table = separation_check(params, spec, [A], grid_shape=(128, 128))
        row = table.rows[0]
        checks += [row.converged, row.separated, row.c_estimate < row.m_lower]
        details.append(
            f"K={K}: A*={A_star:.4g}, at 100*A*: c_est {row.c_estimate:.4g} "
            f"< m_lower {row.m_lower:.4g}, separated={row.separated}"
        )

        record, _well = solve_well_scaled(params, spec, grid_shape=(128, 128))
        checks.append(record.converged)
        profiles[K] = record.u_K
        if metric_A is None:
            metric_A = A

    distance = profile_distance(profiles[2], profiles[3], metric_A, 3.0)
    checks.append(distance > 0.0)
    details.append(f"cross-K distinctness {distance:.4g} > 0")
    _verdict(8, all(checks), "; ".join(details), t0, budget=1800.0)


# --------------------------------------------------------------------------
# 9. gradient correctness: second-order finite-difference convergence
# --------------------------------------------------------------------------


def _fd_orders(profile_of, spec, n_trials: int = 8) -> float:
    """Minimum convergence order of central-difference directional derivatives."""
    rng = np.random.default_rng(0)
    steps = (1e-3, 5e-4, 2.5e-4)
    min_order = math.inf
    for _ in range(n_trials):
        base = profile_of(None)
        shape = base.values.shape
        u = np.abs(rng.standard_normal(shape))
        v = rng.standard_normal(shape)
        _, grad, _ = energy_and_gradient(profile_of(u), spec, 100.0, 1.0)
        directional = float(np.sum(grad * v))
        errs = []
        for h in steps:
            plus, _, _ = energy_and_gradient(profile_of(u + h * v), spec, 100.0, 1.0)
            minus, _, _ = energy_and_gradient(profile_of(u - h * v), spec, 100.0, 1.0)
            errs.append(abs((plus - minus) / (2.0 * h) - directional))
        order = min(
            math.log2(errs[0] / errs[1]), math.log2(errs[1] / errs[2])
        )
        min_order = min(min_order, order)
    return min_order


def test_09_gradient_finite_difference_order():
    t0 = time.perf_counter()
    # smooth cubic/quartic pair: three bounded derivatives keep the
    # central-difference truncation error clean of kink artifacts
    spec = make_custom(
        lambda s: np.where(s > 0.0, s, 0.0) ** 3,
        lambda s: np.where(s > 0.0, s, 0.0) ** 4 / 4.0,
        3.5,
        4.5,
    )
    bgrid = biradial_grid(N=4, K=2, s_max=10.0, t_max=10.0, n_s=48, n_t=48)
    rgrid = radial_grid(5, 20.0, 256)

    def biradial_of(u):
        template = np.ones(bgrid.shape)
        return BiradialProfile(grid=bgrid, values=template if u is None else u)

    def radial_of(u):
        template = np.ones_like(rgrid.r)
        return RadialProfile(grid=rgrid, values=template if u is None else u)

    order_b = _fd_orders(biradial_of, spec)
    order_r = _fd_orders(radial_of, spec)
    ok = order_b >= 1.9 and order_r >= 1.9
    _verdict(
        9,
        ok,
        f"min FD order {order_b:.4f} (2-axis grid), {order_r:.4f} (radial) >= 1.9",
        t0,
        budget=60.0,
    )
