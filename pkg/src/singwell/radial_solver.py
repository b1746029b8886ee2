"""Radial analysis: fibering maps, level-floor certificates, decay bounds.

For a nonnegative radial profile ``u`` the fibering map ``g(t) = I(t u)``
has a unique interior maximum under the slope-monotonicity assumption; its
value at the maximizer, minimized over all admissible profiles, defines the
radial level floor ``m_A``.  The module computes

* :func:`sobolev_constant` -- the constant ``S_N`` in
  ``|u|_{2*} <= S_N |grad u|_2``, evaluated from the closed form and
  cross-checked by integrating the explicit radial optimizer family;
* :func:`fibering_max` -- bracketing + golden-section maximization of the
  fibering map along a ray;
* :func:`estimate_mA` -- an upper estimate of ``m_A`` as the minimum of
  fibering maxima over a trial family (no claim of reaching the infimum);
* :func:`lower_bound_chain` -- the fully explicit chain of inequalities
  (pointwise decay bound -> modified-critical-norm bound -> Sobolev ->
  interpolation -> fibering closed form) that certifies
  ``m_A >= C0 * A**m_exp`` with every link's margin evaluated on the given
  profile;
* :func:`check_radial_bound` -- the pointwise decay bound
  ``|u(r)| <= sqrt(2/sigma_N) A^(-1/4) |u|_A r^(-(2N-2-alpha)/4)``
  verified node by node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from singwell.discretization import RadialGrid, RadialProfile, norm_A, sphere_area
from singwell.exponents import ProblemParams, critical_exponents, level_exponents
from singwell.nonlinearity import NonlinearitySpec

__all__ = [
    "FiberingResult",
    "LowerBoundCert",
    "sobolev_constant",
    "fibering_max",
    "default_trial_family",
    "estimate_mA",
    "lower_bound_chain",
    "check_radial_bound",
]


# --------------------------------------------------------------------------
# Sobolev constant
# --------------------------------------------------------------------------

@lru_cache(maxsize=32)
def sobolev_constant(N: int) -> float:
    """The constant ``S_N`` in ``|u|_{2*} <= S_N |grad u|_2`` on R^N.

    The optimal quotient ``S = inf |grad u|_2^2 / |u|_{2*}^2`` has the closed
    form ``S = pi N (N-2) (Gamma(N/2) / Gamma(N))**(2/N)``; the returned
    value is ``S_N = S**(-1/2)``.  The closed form is cross-checked by
    integrating the Sobolev quotient of the explicit radial optimizer
    ``(1 + r**2)**(-(N-2)/2)`` at several dilations; a relative disagreement
    above 1e-6 raises (it signals a broken quadrature, not a math ambiguity).
    """
    if not isinstance(N, (int, np.integer)) or N < 3:
        raise ValueError(f"N must be an integer >= 3, got {N}")
    N = int(N)
    s_closed = (
        math.pi * N * (N - 2.0) * (math.gamma(N / 2.0) / math.gamma(float(N))) ** (2.0 / N)
    )
    two_star = 2.0 * N / (N - 2.0)
    sig = sphere_area(N)

    def quotient(scale: float) -> float:
        # |grad U_s|^2 and |U_s|_{2*}^{2*} for U_s(r) = (1 + (r/s)^2)^(-(N-2)/2);
        # the quotient is dilation invariant, so every scale must give S.
        grad_integrand = lambda r: (
            ((N - 2.0) * (r / scale) / scale) ** 2
            * (1.0 + (r / scale) ** 2) ** (-N)
            * r ** (N - 1)
        )
        mass_integrand = lambda r: (1.0 + (r / scale) ** 2) ** (-N) * r ** (N - 1)
        grad_val = sig * quad(grad_integrand, 0.0, np.inf, limit=200)[0]
        mass_val = sig * quad(mass_integrand, 0.0, np.inf, limit=200)[0]
        return grad_val / mass_val ** (2.0 / two_star)

    for scale in (0.5, 1.0, 2.0):
        q = quotient(scale)
        if abs(q - s_closed) > 1e-6 * s_closed:
            raise RuntimeError(
                f"Sobolev quotient of the optimizer family ({q:.10g} at scale "
                f"{scale}) disagrees with the closed form {s_closed:.10g}"
            )
    return s_closed ** (-0.5)


# --------------------------------------------------------------------------
# Fibering map
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FiberingResult:
    """Maximum of the fibering map g(t) = I(t u) along the ray through u."""

    t_u: float
    max_value: float
    profile: RadialProfile | object

    def __post_init__(self) -> None:
        if not (self.t_u > 0.0 and math.isfinite(self.t_u)):
            raise ValueError(f"t_u must be positive and finite, got {self.t_u}")


def _ray_energy_factory(profile, spec: NonlinearitySpec, A: float, alpha: float):
    """Return (g, norm_sq) where g(t) = 0.5 t^2 |u|_A^2 - int F(t u)."""
    _, _, norm_sq = norm_A(profile, A, alpha)
    w_meas = profile.grid.quad_weights
    values = profile.values

    def g(t: float) -> float:
        return 0.5 * t * t * norm_sq - float(np.sum(w_meas * spec.F(t * values)))

    return g, norm_sq


def fibering_max(
    profile,
    spec: NonlinearitySpec,
    A: float,
    alpha: float,
    tol: float = 1e-10,
) -> FiberingResult:
    """Maximize ``g(t) = 0.5 t^2 |u|_A^2 - int F(t u)`` over ``t > 0``.

    A geometric scan starting on ``t in [1e-12, 1e12]`` brackets the
    maximizer (superquadratic growth of F guarantees ``g -> -inf``); the
    window is extended decade by decade, up to overflow range, when the
    maximum sits at an end.  Golden-section then refines it.  Failure to
    bracket within ``t <= 1e250`` raises (it signals a nonlinearity
    violating superquadratic growth).
    """
    values = np.asarray(profile.values)
    if np.any(values < 0.0):
        raise ValueError("fibering_max requires a nonnegative profile")
    if not np.any(values > 0.0):
        raise ValueError("fibering_max requires a nonzero profile")
    g, norm_sq = _ray_energy_factory(profile, spec, A, alpha)

    n_decades = 24
    t_samples = list(np.logspace(-12, 12, 2 * n_decades + 1))
    with np.errstate(over="ignore", invalid="ignore"):
        g_samples = [g(t) for t in t_samples]
        k = int(np.argmax(g_samples))
        while k == len(t_samples) - 1:
            t_next = t_samples[-1] * 10.0
            g_next = g(t_next) if t_next <= 1e250 else math.nan
            if t_next > 1e250 or math.isnan(g_next) or g_next == math.inf:
                # either t left the float range or the quadratic term
                # overflowed before F overtook it
                raise RuntimeError(
                    "failed to bracket the fibering maximum below t = 1e250; "
                    "the nonlinearity appears to violate superquadratic growth"
                )
            t_samples.append(t_next)
            g_samples.append(g_next)
            k = int(np.argmax(g_samples))
    while k == 0:
        t_prev = t_samples[0] / 10.0
        if t_prev < 1e-250:
            raise RuntimeError(
                "fibering maximum sits below t = 1e-250; rescale the profile"
            )
        t_samples.insert(0, t_prev)
        g_samples.insert(0, g(t_prev))
        k = int(np.argmax(g_samples))
    lo, hi = t_samples[k - 1], t_samples[k + 1]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    gc, gd = g(c), g(d)
    while hi - lo > tol * max(1.0, hi):
        if gc >= gd:
            hi, d, gd = d, c, gc
            c = hi - invphi * (hi - lo)
            gc = g(c)
        else:
            lo, c, gc = c, d, gd
            d = lo + invphi * (hi - lo)
            gd = g(d)
    t_u = 0.5 * (lo + hi)
    return FiberingResult(t_u=float(t_u), max_value=float(g(t_u)), profile=profile)


def default_trial_family(grid: RadialGrid, n_scales: int = 8) -> list[RadialProfile]:
    """Trial family: centered Gaussians, compact bumps, and annular shells.

    Fibering maxima are invariant along rays, so the family varies shape
    only: Gaussian profiles ``exp(-(r/s)^2)``, compactly supported bumps
    ``exp(-1/(x(1-x)))`` with ``x = r/(2s)``, and shell profiles
    ``exp(-((r-c)/(c/6))^2)`` whose mass sits on an annulus -- the shape a
    strong singular potential drives the minimizer toward -- against
    log-spaced scales spanning the grid.
    """
    scales = np.geomspace(grid.r_max / 200.0, grid.r_max / 2.0, n_scales)
    family: list[RadialProfile] = []
    r = grid.r
    for s in scales:
        family.append(RadialProfile(grid=grid, values=np.exp(-((r / s) ** 2))))
        x = r / (2.0 * s)
        vals = np.zeros_like(r)
        inside = (x > 0.0) & (x < 1.0)
        vals[inside] = np.exp(-1.0 / (x[inside] * (1.0 - x[inside])))
        if np.any(vals > 0.0):
            family.append(RadialProfile(grid=grid, values=vals))
    for c in np.geomspace(grid.r_max / 100.0, 0.7 * grid.r_max, n_scales):
        shell = np.exp(-(((r - c) / (c / 6.0)) ** 2))
        if np.any(shell > 0.0):
            family.append(RadialProfile(grid=grid, values=shell))
    return family


def estimate_mA(
    trial_family,
    spec: NonlinearitySpec,
    A: float,
    alpha: float,
) -> tuple[float, dict]:
    """Upper estimate of the radial floor: min of fibering maxima over a family.

    Returns ``(mA_upper, argmin_descriptor)``; the descriptor records the
    minimizing member's index, its ray parameter ``t_u`` and the value.  This
    is an estimate from above only -- no claim of reaching the true infimum.
    Each member is rescaled to unit ``|.|_A`` norm before maximizing: the
    maximum value is invariant along rays, and normalization keeps the
    maximizer ``t_u`` inside the bracketing window at large ``A``.
    """
    family = list(trial_family)
    if not family:
        raise ValueError("trial_family must be nonempty")
    best = None
    best_idx = -1
    for idx, profile in enumerate(family):
        _, _, norm_sq = norm_A(profile, A, alpha)
        if norm_sq <= 0.0:
            raise ValueError(f"trial family member {idx} has zero energy norm")
        scaled = replace(profile, values=profile.values / math.sqrt(norm_sq))
        result = fibering_max(scaled, spec, A, alpha)
        if best is None or result.max_value < best.max_value:
            best, best_idx = result, idx
    descriptor = {
        "index": best_idx,
        "t_u": best.t_u,
        "max_value": best.max_value,
        "family_size": len(family),
    }
    return float(best.max_value), descriptor


# --------------------------------------------------------------------------
# Explicit lower-bound chain
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LowerBoundCert:
    """Certificate for the explicit radial floor ``m_A >= C0 * A**m_exp``.

    ``p_used`` is the interpolation endpoint (``max(two_star_alpha, p1)``
    below ``alpha = 2``, ``min(two_star_alpha, p2)`` above),
    ``lambda_interp`` solves ``p = lambda 2* + (1 - lambda) 2*_alpha``,
    ``C_interp`` is the interpolated norm constant, ``C0`` the floor
    prefactor, ``m_exp`` the growth exponent, and ``S_N`` the Sobolev
    constant used in the chain.
    """

    p_used: float
    lambda_interp: float
    C_interp: float
    C0: float
    m_exp: float
    S_N: float
    A: float
    margins: dict

    def __post_init__(self) -> None:
        if not (0.0 <= self.lambda_interp <= 1.0):
            raise ValueError(
                f"lambda_interp must lie in [0, 1], got {self.lambda_interp}"
            )
        if not (self.C0 > 0.0):
            raise ValueError(f"C0 must be positive, got {self.C0}")


def chain_constants(
    N: int,
    alpha: float,
    p1: float,
    p2: float,
    M2: float,
    A: float,
) -> tuple[float, float, float, float, float]:
    """(p_used, lambda_interp, C_interp, C0, m_exp) of the explicit chain.

    The chain: the pointwise decay bound gives
    ``int |u|^(2*_alpha) <= (2/sigma_N)^(2 alpha/(2N-2-alpha))
    * A^(-(2N-2)/(2N-2-alpha)) * |u|_A^(2*_alpha)``; the Sobolev bound gives
    ``int |u|^(2*) <= S_N^(2*) |u|_A^(2*)``; interpolation at ``p_used``
    yields ``int |u|^p <= C_interp * A^(-beta) |u|_A^p`` with
    ``beta = (1 - lambda)(2N-2)/(2N-2-alpha)``; finally
    ``I(t u) >= t^2 |u|_A^2 / 2 - M2 C_interp A^(-beta) t^p |u|_A^p`` is
    maximized in closed form, giving the profile-independent floor
    ``C0 * A^(m_exp)`` with ``m_exp = 2 beta / (p - 2)``.
    """
    if alpha == 2.0:
        raise ValueError("the chain requires alpha != 2")
    if alpha >= 2.0 * N - 2.0:
        raise ValueError(f"the chain requires alpha < 2N-2 = {2 * N - 2}")
    table = critical_exponents(N, alpha)
    ts, tsa = table.two_star, table.two_star_alpha
    if alpha < 2.0:
        if not (2.0 < p1 < ts):
            raise ValueError(f"need 2 < p1 < {ts:g} for alpha < 2, got p1={p1}")
        p_used = max(tsa, p1)
    else:
        if not (p2 > ts):
            raise ValueError(f"need p2 > {ts:g} for alpha > 2, got p2={p2}")
        p_used = min(tsa, p2)
    lam = (p_used - tsa) / (ts - tsa)
    sig = sphere_area(N)
    s_n = sobolev_constant(N)
    xi = 2.0 * N - 2.0 - alpha
    c_interp = s_n ** (lam * ts) * (2.0 / sig) ** (2.0 * alpha * (1.0 - lam) / xi)
    beta = (1.0 - lam) * (2.0 * N - 2.0) / xi
    m_exp = 2.0 * beta / (p_used - 2.0)
    # closed-form maximum of t^2 X/2 - Y t^p over t > 0, with the
    # profile-norm powers cancelling exactly:
    p = p_used
    c0 = (p - 2.0) / (2.0 * p ** (p / (p - 2.0))) * (M2 * c_interp) ** (-2.0 / (p - 2.0))
    # consistency with the closed-form exponent (N-2)/(alpha-2)*(p-2*)/(p-2)
    direct = (N - 2.0) / (alpha - 2.0) * (p_used - ts) / (p_used - 2.0)
    if abs(direct - m_exp) > 1e-12 * max(1.0, abs(m_exp)):
        raise AssertionError(
            f"chain exponent {m_exp!r} disagrees with the closed form {direct!r}"
        )
    return p_used, lam, c_interp, c0, m_exp


def lower_bound_chain(
    profile: RadialProfile,
    params: ProblemParams,
    spec: NonlinearitySpec,
) -> LowerBoundCert:
    """Evaluate and certify every link of the explicit floor on one profile.

    Margins (relative, each must be >= 0 up to discretization slack):

    * ``modified_critical`` -- ``int |u|^(2*_alpha)`` against the decay-bound
      estimate with its explicit A power;
    * ``sobolev``          -- ``int |u|^(2*)`` against ``S_N^(2*) |u|_A^(2*)``;
    * ``interpolation``    -- ``int |u|^p`` against the Hoelder product;
    * ``fibering_floor``   -- the actual fibering maximum against
      ``C0 * A**m_exp``.
    """
    N, alpha, A = params.N, params.alpha, params.A
    if not isinstance(profile.grid, RadialGrid):
        raise TypeError("lower_bound_chain requires a radial profile")
    if profile.grid.N != N:
        raise ValueError(
            f"profile dimension N={profile.grid.N} does not match params N={N}"
        )
    values = np.abs(np.asarray(profile.values, dtype=float))
    if not np.any(values > 0.0):
        raise ValueError("the chain requires a nonzero profile")
    p_used, lam, c_interp, c0, m_exp = chain_constants(
        N, alpha, params.p1, params.p2, spec.M2, A
    )
    table = critical_exponents(N, alpha)
    ts, tsa = table.two_star, table.two_star_alpha
    sig = sphere_area(N)
    s_n = sobolev_constant(N)
    xi = 2.0 * N - 2.0 - alpha

    w = profile.grid.quad_weights
    _, _, norm_sq = norm_A(profile, A, alpha)
    norm = math.sqrt(norm_sq)
    int_tsa = float(np.sum(w * values**tsa))
    int_ts = float(np.sum(w * values**ts))
    int_p = float(np.sum(w * values**p_used))

    rhs_tsa = (2.0 / sig) ** (2.0 * alpha / xi) * A ** (-(2.0 * N - 2.0) / xi) * norm**tsa
    rhs_ts = s_n**ts * norm**ts
    rhs_interp = int_ts**lam * int_tsa ** (1.0 - lam)
    fib = fibering_max(profile, spec, A, alpha)
    floor = c0 * A**m_exp

    margins = {
        "modified_critical": (rhs_tsa - int_tsa) / rhs_tsa,
        "sobolev": (rhs_ts - int_ts) / rhs_ts,
        "interpolation": (rhs_interp - int_p) / rhs_interp,
        "fibering_floor": (fib.max_value - floor) / max(fib.max_value, floor),
    }
    return LowerBoundCert(
        p_used=p_used,
        lambda_interp=lam,
        C_interp=c_interp,
        C0=c0,
        m_exp=m_exp,
        S_N=s_n,
        A=A,
        margins=margins,
    )


def check_radial_bound(
    profile: RadialProfile, A: float, alpha: float
) -> tuple[float, float]:
    """Verify the pointwise decay bound at every node.

    The bound: ``|u(r)| <= sqrt(2/sigma_N) A^(-1/4) |u|_A r^(-(2N-2-alpha)/4)``
    for every radial ``u`` (requires ``alpha < 2N - 2``).  Returns
    ``(worst_margin, worst_r)`` with ``worst_margin = min_r (RHS - |u|)/RHS``;
    a zero profile is vacuously fine (margin 1).
    """
    grid = profile.grid
    if not isinstance(grid, RadialGrid):
        raise TypeError("check_radial_bound requires a radial profile")
    N = grid.N
    if alpha >= 2.0 * N - 2.0:
        raise ValueError(f"the decay bound requires alpha < 2N-2 = {2 * N - 2}")
    values = np.abs(np.asarray(profile.values, dtype=float))
    if not np.any(values > 0.0):
        return 1.0, math.nan
    _, _, norm_sq = norm_A(profile, A, alpha)
    rhs = (
        math.sqrt(2.0 / sphere_area(N))
        * A ** (-0.25)
        * math.sqrt(norm_sq)
        * grid.r ** (-(2.0 * N - 2.0 - alpha) / 4.0)
    )
    margins = (rhs - values) / rhs
    worst = int(np.argmin(margins))
    return float(margins[worst]), float(grid.r[worst])
