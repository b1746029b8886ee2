"""Concentrating bump family and explicit mountain-pass level upper bounds.

A smooth positive tensor bump ``psi`` lives on the reference rectangle
``E = (1/4, 3/4) x (pi/6, pi/3)`` in polar coordinates ``(r, phi)``.  For
``0 < eps <= 1`` the anisotropic rescaling

    psi_eps(rho, theta) = psi(rho**(1/eps), theta/eps)

squeezes the support onto ``E_eps = ((1/4)**eps, (3/4)**eps) x
(pi*eps/6, pi*eps/3)``, and lifting through ``(s, t) = (rho cos theta,
rho sin theta)`` with ``s = |y|, t = |z|`` produces a biradial profile
``v_eps`` on ``R^K x R^(N-K)``.

The module evaluates the potential, nonlinear-mass and gradient integrals of
``v_eps`` along two independent routes:

* :func:`reduced_integrals` -- Gauss-Legendre quadrature over the fixed
  rectangle ``E`` after the change of variables ``r = rho**(1/eps)``,
  ``phi = theta/eps``; the reduced integrands carry the explicit ``eps``
  powers and the angular weight ``H(eps*phi)``;
* :func:`direct_integrals` -- quadrature of the lifted profile on a physical
  ``(s, t)`` grid, with :func:`polar_direct_integrals` as a third,
  spectrally accurate route in the physical polar variables.

Their agreement certifies the change-of-variables identities.  On top of the
identities the module computes the energy ratio ``|w_A|_A^2 / int F(w_A)``
for ``w_A = v_(A^(-1/2))`` together with its threshold ``A0``, builds the
dilated endpoint profile ``ubar`` with strictly negative energy, and returns
the closed-form straight-path upper bound whose growth in ``A`` has exponent
``(K-1)/2 + N(1/alpha - 1/2)`` for ``alpha < 2`` and ``(K-1)/2`` for
``alpha > 2``.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq

from singwell.discretization import (
    BiradialGrid,
    BiradialProfile,
    biradial_grid,
    energy_and_gradient,
    sphere_area,
)
from singwell.nonlinearity import NonlinearitySpec

__all__ = [
    "R_LO",
    "R_HI",
    "PHI_LO",
    "PHI_HI",
    "BumpSpec",
    "ScaledBump",
    "make_bump",
    "angular_weight",
    "reduced_integrals",
    "polar_direct_integrals",
    "direct_integrals",
    "limit_integrals",
    "energy_ratio",
    "ratio_and_A0",
    "build_ubar",
    "path_upper_bound",
    "calibrate_amplitude",
]

# Reference rectangle E = (R_LO, R_HI) x (PHI_LO, PHI_HI) in (r, phi).
R_LO = 0.25
R_HI = 0.75
PHI_LO = math.pi / 6.0
PHI_HI = math.pi / 3.0


# --------------------------------------------------------------------------
# One-dimensional bump factors
# --------------------------------------------------------------------------

def _tensor_factor(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Normalized flat bump ``exp(4 - 1/(x(1-x)))`` on (0, 1) and derivative.

    The factor peaks at exactly 1 at ``x = 1/2`` and vanishes with all
    derivatives at 0 and 1.
    """
    x = np.asarray(x, dtype=float)
    val = np.zeros_like(x)
    der = np.zeros_like(x)
    inside = (x > 0.0) & (x < 1.0)
    xi = x[inside]
    u = xi * (1.0 - xi)
    v = np.exp(4.0 - 1.0 / u)
    val[inside] = v
    der[inside] = v * (1.0 - 2.0 * xi) / (u * u)
    return val, der


def _smoothstep(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """C-infinity step ``h(y)/(h(y)+h(1-y))`` with ``h(y)=exp(-1/y)``.

    Identically 0 for ``y <= 0`` and identically 1 for ``y >= 1``.
    """
    y = np.asarray(y, dtype=float)
    val = np.where(y >= 1.0, 1.0, 0.0)
    der = np.zeros_like(y)
    inside = (y > 0.0) & (y < 1.0)
    yi = y[inside]
    h = np.exp(-1.0 / yi)
    hm = np.exp(-1.0 / (1.0 - yi))
    denom = h + hm
    val[inside] = h / denom
    der[inside] = (h / yi**2 * hm + h * hm / (1.0 - yi) ** 2) / denom**2
    return val, der


def _plateau_factor(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Flat-topped bump: identically 1 on [1/3, 2/3], C-infinity on (0, 1)."""
    x = np.asarray(x, dtype=float)
    up, dup = _smoothstep(3.0 * x)
    down, ddown = _smoothstep(3.0 * (1.0 - x))
    return up * down, 3.0 * (dup * down - up * ddown)


_FACTORS = {"tensor": _tensor_factor, "plateau": _plateau_factor}


def angular_weight(theta, N: int, K: int):
    """Bi-spherical angular weight ``H(theta) = cos^(K-1) * sin^(N-K-1)``."""
    theta = np.asarray(theta, dtype=float)
    return np.cos(theta) ** (K - 1) * np.sin(theta) ** (N - K - 1)


# --------------------------------------------------------------------------
# Bump types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BumpSpec:
    """Smooth positive bump on E, given as a closed-form tensor product.

    ``value(r, phi) = amplitude * b((r-1/4)/(1/2)) * b((phi-pi/6)/(pi/6))``
    where the one-dimensional factor ``b`` is either the flat bump
    ``exp(4 - 1/(x(1-x)))`` (kind "tensor", peak exactly ``amplitude``) or a
    C-infinity flat-topped plateau (kind "plateau", identically ``amplitude``
    on the middle third of each axis).  Both kinds vanish with all
    derivatives on the boundary of E, so every lifted profile is smooth and
    compactly supported.
    """

    kind: str = "tensor"
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in _FACTORS:
            raise ValueError(
                f"unknown bump kind {self.kind!r}; choose from {sorted(_FACTORS)}"
            )
        if not (self.amplitude > 0.0 and math.isfinite(self.amplitude)):
            raise ValueError(f"amplitude must be positive and finite, got {self.amplitude}")

    def with_amplitude(self, amplitude: float) -> "BumpSpec":
        return dataclasses.replace(self, amplitude=float(amplitude))

    def value(self, r, phi) -> np.ndarray:
        """psi(r, phi); zero outside E."""
        fac = _FACTORS[self.kind]
        br, _ = fac((np.asarray(r, dtype=float) - R_LO) / (R_HI - R_LO))
        bp, _ = fac((np.asarray(phi, dtype=float) - PHI_LO) / (PHI_HI - PHI_LO))
        return self.amplitude * br * bp

    def partials(self, r, phi) -> tuple[np.ndarray, np.ndarray]:
        """(psi_r, psi_phi); zero outside E."""
        fac = _FACTORS[self.kind]
        br, dbr = fac((np.asarray(r, dtype=float) - R_LO) / (R_HI - R_LO))
        bp, dbp = fac((np.asarray(phi, dtype=float) - PHI_LO) / (PHI_HI - PHI_LO))
        psi_r = self.amplitude * dbr * bp / (R_HI - R_LO)
        psi_phi = self.amplitude * br * dbp / (PHI_HI - PHI_LO)
        return psi_r, psi_phi

    def reference_integrals(
        self, spec: NonlinearitySpec | None = None, n_nodes: int = 64
    ) -> dict:
        """Reference integrals over E: ``q_grad = int (psi_r^2 + psi_phi^2/r^2)``,
        ``q_sq = int psi^2``, ``q_sq_r = int psi^2 r``, and (when ``spec`` is
        given) ``q_F = int F(psi)``.  All are finite and strictly positive.
        """
        r, phi, w = _e_quadrature(n_nodes)
        psi = self.value(r, phi)
        psi_r, psi_phi = self.partials(r, phi)
        out = {
            "q_grad": float(np.sum(w * (psi_r**2 + psi_phi**2 / r**2))),
            "q_sq": float(np.sum(w * psi**2)),
            "q_sq_r": float(np.sum(w * psi**2 * r)),
        }
        if spec is not None:
            out["q_F"] = float(np.sum(w * spec.F(psi)))
        return out


def make_bump(kind: str = "tensor", amplitude: float = 1.0) -> BumpSpec:
    """Construct a :class:`BumpSpec` (normalized peak = ``amplitude``)."""
    return BumpSpec(kind=kind, amplitude=amplitude)


@dataclass(frozen=True)
class ScaledBump:
    """The rescaled bump ``psi_eps(rho, theta) = psi(rho**(1/eps), theta/eps)``.

    Supported exactly on ``E_eps = ((1/4)**eps, (3/4)**eps) x
    (pi*eps/6, pi*eps/3)``; the lifted biradial profile is
    ``v_eps(s, t) = psi_eps(hypot(s, t), atan2(t, s)) >= 0``.
    """

    bump: BumpSpec
    epsilon: float

    def __post_init__(self) -> None:
        if not (0.0 < self.epsilon <= 1.0):
            raise ValueError(f"epsilon must lie in (0, 1], got {self.epsilon}")

    @property
    def support(self) -> tuple[float, float, float, float]:
        """(rho_lo, rho_hi, theta_lo, theta_hi) bounds of E_eps."""
        e = self.epsilon
        return (R_LO**e, R_HI**e, PHI_LO * e, PHI_HI * e)

    @property
    def support_box(self) -> tuple[float, float, float, float]:
        """(s_lo, s_hi, t_lo, t_hi) bounding box of the lifted support."""
        rho_lo, rho_hi, th_lo, th_hi = self.support
        return (
            rho_lo * math.cos(th_hi),
            rho_hi * math.cos(th_lo),
            rho_lo * math.sin(th_lo),
            rho_hi * math.sin(th_hi),
        )

    def _pullback(self, rho, theta):
        """Map (rho, theta) to (r, phi) on the support; mask elsewhere."""
        rho = np.asarray(rho, dtype=float)
        theta = np.asarray(theta, dtype=float)
        rho, theta = np.broadcast_arrays(rho, theta)
        rho_lo, rho_hi, th_lo, th_hi = self.support
        mask = (rho > rho_lo) & (rho < rho_hi) & (theta > th_lo) & (theta < th_hi)
        r = np.full(rho.shape, 0.5 * (R_LO + R_HI))
        phi = np.full(rho.shape, 0.5 * (PHI_LO + PHI_HI))
        r[mask] = rho[mask] ** (1.0 / self.epsilon)
        phi[mask] = theta[mask] / self.epsilon
        return r, phi, mask

    def value_polar(self, rho, theta) -> np.ndarray:
        r, phi, mask = self._pullback(rho, theta)
        return np.where(mask, self.bump.value(r, phi), 0.0)

    def partials_polar(self, rho, theta) -> tuple[np.ndarray, np.ndarray]:
        """(d psi_eps / d rho, d psi_eps / d theta)."""
        rho = np.asarray(rho, dtype=float)
        r, phi, mask = self._pullback(rho, theta)
        psi_r, psi_phi = self.bump.partials(r, phi)
        inv = 1.0 / self.epsilon
        rho_b = np.broadcast_to(rho, r.shape)
        d_rho = np.zeros(r.shape)
        d_rho[mask] = inv * rho_b[mask] ** (inv - 1.0) * psi_r[mask]
        d_theta = np.where(mask, inv * psi_phi, 0.0)
        return d_rho, d_theta

    def value_cart(self, s, t) -> np.ndarray:
        """Lifted biradial profile v_eps(s, t) with s = |y|, t = |z|."""
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        return self.value_polar(np.hypot(s, t), np.arctan2(t, s))

    def profile_on(self, grid: BiradialGrid) -> BiradialProfile:
        values = self.value_cart(grid.s[:, None], grid.t[None, :])
        return BiradialProfile(grid=grid, values=values)


# --------------------------------------------------------------------------
# Quadrature caches
# --------------------------------------------------------------------------

@lru_cache(maxsize=32)
def _gl_unit(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [0, 1]."""
    x, w = leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=16)
def _e_quadrature(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tensor Gauss-Legendre rule over E: meshed (r, phi, weights)."""
    x, w = _gl_unit(n)
    r = R_LO + (R_HI - R_LO) * x
    phi = PHI_LO + (PHI_HI - PHI_LO) * x
    wr = (R_HI - R_LO) * w
    wp = (PHI_HI - PHI_LO) * w
    r2, phi2 = np.meshgrid(r, phi, indexing="ij")
    return r2, phi2, np.outer(wr, wp)


def _validate_nk(N: int, K: int) -> None:
    if not (isinstance(N, (int, np.integer)) and isinstance(K, (int, np.integer))):
        raise TypeError("N and K must be integers")
    if N < 4 or not (2 <= K <= N - 2):
        raise ValueError(f"need N >= 4 and 2 <= K <= N-2, got N={N}, K={K}")


# --------------------------------------------------------------------------
# The three integral identities
# --------------------------------------------------------------------------

def reduced_integrals(
    bump: BumpSpec,
    spec: NonlinearitySpec,
    N: int,
    K: int,
    alpha: float,
    epsilon: float,
    n_nodes: int = 64,
) -> tuple[float, float, float]:
    """Integrals of the lifted profile in reduced form over E.

    Returns ``(pot, mass_F, grad)`` with

    * ``pot    = sigma_K sigma_{N-K} eps^2 int_E psi^2 r^((N-alpha)eps - 1) H(eps phi)``
      (the potential integral ``int v_eps^2 |x|^(-alpha)``, without the factor A),
    * ``mass_F = sigma_K sigma_{N-K} eps^2 int_E F(psi) r^(N eps - 1) H(eps phi)``,
    * ``grad   = sigma_K sigma_{N-K} int_E (psi_r^2 + psi_phi^2 / r^2)
      r^((N-2)eps + 1) H(eps phi)`` (no eps^2 prefactor).
    """
    _validate_nk(N, K)
    if not (0.0 < epsilon <= 1.0):
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    e = float(epsilon)
    r, phi, w = _e_quadrature(n_nodes)
    sig = sphere_area(K) * sphere_area(N - K)
    h = angular_weight(e * phi, N, K)
    psi = bump.value(r, phi)
    psi_r, psi_phi = bump.partials(r, phi)
    pot = sig * e**2 * float(np.sum(w * psi**2 * r ** ((N - alpha) * e - 1.0) * h))
    mass_f = sig * e**2 * float(np.sum(w * spec.F(psi) * r ** (N * e - 1.0) * h))
    grad = sig * float(
        np.sum(w * (psi_r**2 + psi_phi**2 / r**2) * r ** ((N - 2.0) * e + 1.0) * h)
    )
    return pot, mass_f, grad


def polar_direct_integrals(
    bump: BumpSpec,
    spec: NonlinearitySpec,
    N: int,
    K: int,
    alpha: float,
    epsilon: float,
    n_nodes: int = 64,
) -> tuple[float, float, float]:
    """Same integrals evaluated in the physical polar variables over E_eps.

    ``(pot, mass_F, grad)`` with ``pot = sigma_K sigma_{N-K} int_{E_eps}
    psi_eps^2 rho^(N-1-alpha) H(theta)`` and companions; the gradient uses the
    closed-form partials of ``psi_eps``.  This route never performs the
    ``r = rho**(1/eps)`` change of variables, so its agreement with
    :func:`reduced_integrals` certifies that change of variables at
    quadrature accuracy.
    """
    _validate_nk(N, K)
    scaled = ScaledBump(bump=bump, epsilon=epsilon)
    rho_lo, rho_hi, th_lo, th_hi = scaled.support
    x, wx = _gl_unit(n_nodes)
    rho = rho_lo + (rho_hi - rho_lo) * x
    th = th_lo + (th_hi - th_lo) * x
    w = np.outer((rho_hi - rho_lo) * wx, (th_hi - th_lo) * wx)
    rho2, th2 = np.meshgrid(rho, th, indexing="ij")
    sig = sphere_area(K) * sphere_area(N - K)
    h = angular_weight(th2, N, K)
    v = scaled.value_polar(rho2, th2)
    v_rho, v_th = scaled.partials_polar(rho2, th2)
    pot = sig * float(np.sum(w * v**2 * rho2 ** (N - 1.0 - alpha) * h))
    mass_f = sig * float(np.sum(w * spec.F(v) * rho2 ** (N - 1.0) * h))
    grad = sig * float(
        np.sum(w * (v_rho**2 + v_th**2 / rho2**2) * rho2 ** (N - 1.0) * h)
    )
    return pot, mass_f, grad


def direct_integrals(
    bump: BumpSpec,
    spec: NonlinearitySpec,
    N: int,
    K: int,
    alpha: float,
    epsilon: float,
    grid: BiradialGrid | None = None,
    n_s: int = 1024,
    n_t: int = 1024,
) -> tuple[float, float, float]:
    """Integrals of the lifted profile on a physical (s, t) grid.

    Returns ``(pot, mass_F, grad)`` where ``pot = int v_eps^2 |x|^(-alpha)``,
    ``mass_F = int F(v_eps)``, and ``grad = int |grad v_eps|^2``, all computed
    with the bi-spherical quadrature weight
    ``sigma_K sigma_{N-K} s^(K-1) t^(N-K-1)`` and the closed-form gradient
    ``|grad v|^2 = v_rho^2 + v_theta^2 / rho^2``.

    When ``grid`` is omitted, a grid of ``n_s x n_t`` cells fitted to the
    bounding box of the support of ``v_eps`` is built.  A warning is issued
    when fewer than 32 cells fall across the support in either direction.
    """
    _validate_nk(N, K)
    scaled = ScaledBump(bump=bump, epsilon=epsilon)
    s_lo, s_hi, t_lo, t_hi = scaled.support_box
    if grid is None:
        grid = biradial_grid(
            N, K, s_max=s_hi, t_max=t_hi, n_s=n_s, n_t=n_t, s_min=s_lo, t_min=t_lo
        )
    else:
        if grid.N != N or grid.K != K:
            raise ValueError(
                f"grid dimensions (N={grid.N}, K={grid.K}) do not match (N={N}, K={K})"
            )
    cells_s = int(np.count_nonzero((grid.s > s_lo) & (grid.s < s_hi)))
    cells_t = int(np.count_nonzero((grid.t > t_lo) & (grid.t < t_hi)))
    if min(cells_s, cells_t) < 32:
        warnings.warn(
            f"support under-resolved: {cells_s} x {cells_t} cells across the "
            f"lifted support [{s_lo:.3g}, {s_hi:.3g}] x [{t_lo:.3g}, {t_hi:.3g}]",
            stacklevel=2,
        )
    ss = grid.s[:, None]
    tt = grid.t[None, :]
    rho = grid.rho
    theta = np.arctan2(tt, ss)
    v = scaled.value_polar(rho, theta)
    v_rho, v_th = scaled.partials_polar(rho, theta)
    w = grid.quad_weights
    pot = float(np.sum(w * v**2 * rho ** (-alpha)))
    mass_f = float(np.sum(w * spec.F(v)))
    grad = float(np.sum(w * (v_rho**2 + v_th**2 / rho**2)))
    return pot, mass_f, grad


def limit_integrals(
    bump: BumpSpec,
    spec: NonlinearitySpec,
    N: int,
    K: int,
    n_nodes: int = 64,
) -> dict:
    """Leading-order integrals of the eps -> 0 limit.

    Replacing ``H(eps phi)`` by its leading power
    ``eps^(N-K-1) phi^(N-K-1)`` and every ``r``-power by its limit
    (``r^(...eps - 1) -> 1/r``, ``r^(...eps + 1) -> r``) gives the finite
    limits ``q_grad_limit, q_pot_limit, q_mass_limit`` (each still carrying
    ``sigma_K sigma_{N-K}``), and

        ``ratio_over_A_limit = (q_grad_limit + q_pot_limit) / q_mass_limit``

    which is the limit of ``ratio(A) / A`` along ``eps = A^(-1/2)``.
    """
    _validate_nk(N, K)
    r, phi, w = _e_quadrature(n_nodes)
    sig = sphere_area(K) * sphere_area(N - K)
    ang = phi ** (N - K - 1.0)
    psi = bump.value(r, phi)
    psi_r, psi_phi = bump.partials(r, phi)
    q_grad = sig * float(np.sum(w * (psi_r**2 + psi_phi**2 / r**2) * r * ang))
    q_pot = sig * float(np.sum(w * psi**2 / r * ang))
    q_mass = sig * float(np.sum(w * spec.F(psi) / r * ang))
    return {
        "q_grad_limit": q_grad,
        "q_pot_limit": q_pot,
        "q_mass_limit": q_mass,
        "ratio_over_A_limit": (q_grad + q_pot) / q_mass,
    }


# --------------------------------------------------------------------------
# Energy ratio, threshold A0, endpoint profile, path bound
# --------------------------------------------------------------------------

def energy_ratio(
    bump: BumpSpec,
    spec: NonlinearitySpec,
    N: int,
    K: int,
    alpha: float,
    A: float,
    n_nodes: int = 64,
) -> float:
    """``|w_A|_A^2 / int F(w_A)`` for ``w_A = v_(A^(-1/2))``, via reduced form."""
    if not (A > 1.0):
        raise ValueError(f"A must exceed 1, got {A}")
    pot, mass_f, grad = reduced_integrals(
        bump, spec, N, K, alpha, A ** (-0.5), n_nodes=n_nodes
    )
    return (grad + A * pot) / mass_f


def ratio_and_A0(
    bump: BumpSpec,
    spec: NonlinearitySpec,
    N: int,
    K: int,
    alpha: float,
    A_list,
) -> tuple[np.ndarray, float]:
    """Energy ratios along ``A_list`` and the threshold A0.

    ``ratios[i] = |w_A|_A^2 / int F(w_A)`` at ``A = A_list[i]`` (computed via
    :func:`reduced_integrals` at ``eps = A^(-1/2)``); ``A0`` is the least
    listed ``A`` with ratio > 1.  Raises when no listed ``A`` achieves
    ratio > 1 (the ratio grows linearly in ``A``, so extending the list
    upward always succeeds eventually).
    """
    A_arr = np.asarray(A_list, dtype=float)
    if A_arr.ndim != 1 or A_arr.size == 0:
        raise ValueError("A_list must be a nonempty 1-D sequence")
    if not np.all(np.diff(A_arr) > 0.0):
        raise ValueError("A_list must be strictly increasing")
    if not np.all(A_arr > 1.0):
        raise ValueError("all entries of A_list must exceed 1")
    ratios = np.array(
        [energy_ratio(bump, spec, N, K, alpha, float(a)) for a in A_arr]
    )
    above = np.nonzero(ratios > 1.0)[0]
    if above.size == 0:
        raise ValueError(
            "no listed A achieves energy ratio > 1 "
            f"(largest ratio {ratios.max():.6g} at A = {A_arr[ratios.argmax()]:g}); "
            "extend A_list upward"
        )
    return ratios, float(A_arr[above[0]])


def _scaling_data(
    bump: BumpSpec,
    spec: NonlinearitySpec,
    N: int,
    K: int,
    alpha: float,
    A: float,
    n_nodes: int = 64,
) -> tuple[float, float, float, float, float]:
    """(eps, pot, mass_f, grad, lam) shared by build_ubar/path_upper_bound."""
    if alpha == 2.0:
        raise ValueError("the dilation construction requires alpha != 2")
    eps = A ** (-0.5)
    pot, mass_f, grad = reduced_integrals(bump, spec, N, K, alpha, eps, n_nodes=n_nodes)
    ratio = (grad + A * pot) / mass_f
    if ratio <= 1.0:
        raise ValueError(
            f"A = {A:g} is not above the threshold A0 for this bump: energy "
            f"ratio {ratio:.6g} <= 1, so the dilation factor would not exceed 1; "
            "increase A or recalibrate the bump amplitude"
        )
    lam = ratio ** (1.0 / alpha) if alpha < 2.0 else math.sqrt(ratio)
    return eps, pot, mass_f, grad, lam


def build_ubar(
    bump: BumpSpec,
    spec: NonlinearitySpec,
    N: int,
    K: int,
    alpha: float,
    A: float,
    grid: BiradialGrid | None = None,
    n_s: int = 192,
    n_t: int = 192,
    box: tuple[float, float] | None = None,
    margin: float = 1.1,
) -> tuple[BiradialProfile, float, float]:
    """Dilated endpoint profile ``ubar(x) = w_A(x / lambda)``.

    ``lambda = (|w_A|_A^2 / int F(w_A))^(1/alpha)`` for ``alpha < 2`` and the
    square root of the same ratio for ``alpha > 2``; both exceed 1 exactly
    when the energy ratio exceeds 1, which is enforced (A must exceed the
    bump's threshold A0).  Returns ``(ubar, lambda, I_ubar)`` where ``ubar``
    is realized on a grid containing the dilated support (a fitted box of
    ``n_s x n_t`` cells when ``grid``/``box`` are omitted) and ``I_ubar``,
    its discrete energy, is verified strictly negative.
    """
    eps, pot, mass_f, grad, lam = _scaling_data(bump, spec, N, K, alpha, A)
    scaled = ScaledBump(bump=bump, epsilon=eps)
    s_lo, s_hi, t_lo, t_hi = scaled.support_box
    if grid is None:
        if box is None:
            box = (margin * lam * s_hi, max(margin * lam * t_hi * 3.0, 0.35 * margin * lam * s_hi))
        grid = biradial_grid(N, K, s_max=box[0], t_max=box[1], n_s=n_s, n_t=n_t)
    span_ok = (
        grid.s_span[0] <= lam * s_lo
        and grid.s_span[1] >= lam * s_hi
        and grid.t_span[0] <= lam * t_lo
        and grid.t_span[1] >= lam * t_hi
    )
    if not span_ok:
        raise ValueError(
            f"grid box {grid.s_span} x {grid.t_span} does not contain the "
            f"dilated support [{lam * s_lo:.4g}, {lam * s_hi:.4g}] x "
            f"[{lam * t_lo:.4g}, {lam * t_hi:.4g}]"
        )
    values = scaled.value_cart(grid.s[:, None] / lam, grid.t[None, :] / lam)
    ubar = BiradialProfile(grid=grid, values=values)
    i_ubar, _, _ = energy_and_gradient(ubar, spec, A, alpha)
    if not (i_ubar < 0.0):
        raise ValueError(
            f"discrete energy of ubar is {i_ubar:.6g} >= 0; the grid "
            f"({grid.shape[0]} x {grid.shape[1]} cells) under-resolves the "
            "dilated support — increase the resolution"
        )
    return ubar, lam, float(i_ubar)


def path_upper_bound(
    bump: BumpSpec,
    spec: NonlinearitySpec,
    N: int,
    K: int,
    alpha: float,
    A: float,
    n_nodes: int = 64,
    tol: float = 1e-10,
) -> tuple[float, float]:
    """Closed-form upper bound for the straight-path energy maximum.

    With ``a = |ubar|_A^2`` and ``b = int F(ubar)`` (both evaluated in
    reduced form, so no grid enters), the superquadratic lower bound
    ``F(t s) >= t^mu F(s)`` for ``t in [0, 1]`` gives the majorant
    ``g(t) = a t^2 / 2 - b t^mu`` with maximum
    ``a (a/(b mu))^(2/(mu-2)) (1/2 - 1/mu)``.  Bounding the dilation powers
    by the dominant one (``lambda^(N-2), lambda^(N-alpha) <=
    lambda^(N-min(alpha,2))`` since ``lambda > 1``) and inserting the
    definition of ``lambda`` collapses the majorant maximum to the explicit
    form returned here,

        ``bound = (1/mu)^(2/(mu-2)) (1/2 - 1/mu) * S^(N/alpha) /
        M^((N-alpha)/alpha)``            for ``alpha < 2``,
        ``bound = (1/mu)^(2/(mu-2)) (1/2 - 1/mu) * S^(N/2) / M^((N-2)/2)``
                                        for ``alpha > 2``,

    where ``S = |w_A|_A^2`` and ``M = int F(w_A)``.  As a function of ``A``
    (through ``eps = A^(-1/2)``) the bound is an exact power law up to the
    slow drift of the reduced integrals, with exponent
    ``(K-1)/2 + N(1/alpha - 1/2)`` for ``alpha < 2`` and ``(K-1)/2`` for
    ``alpha > 2``.  Returns ``(t_max, bound)`` where ``t_max`` is the
    golden-section argmax of the true path energy ``I(t ubar)`` over [0, 1];
    the bound is asserted to dominate the true maximum.
    """
    eps, pot, mass_f, grad, lam = _scaling_data(bump, spec, N, K, alpha, A, n_nodes)
    mu = spec.mu
    a = lam ** (N - 2.0) * grad + lam ** (N - alpha) * A * pot
    b = lam**N * mass_f
    m_const = (1.0 / mu) ** (2.0 / (mu - 2.0)) * (0.5 - 1.0 / mu)
    big_s = grad + A * pot
    if alpha < 2.0:
        bound = m_const * big_s ** (N / alpha) / mass_f ** ((N - alpha) / alpha)
    else:
        bound = m_const * big_s ** (N / 2.0) / mass_f ** ((N - 2.0) / 2.0)

    # True path energy: I(t ubar) = t^2 a / 2 - lam^N * (reduced F-mass of t psi).
    e = eps
    r, phi, w = _e_quadrature(n_nodes)
    sig = sphere_area(K) * sphere_area(N - K)
    wf = sig * e**2 * w * r ** (N * e - 1.0) * angular_weight(e * phi, N, K) * lam**N
    psi = bump.value(r, phi)

    def path_energy(t: float) -> float:
        return 0.5 * t * t * a - float(np.sum(wf * spec.F(t * psi)))

    t_max = _golden_max(path_energy, 0.0, 1.0, tol)
    i_max = path_energy(t_max)
    slack = tol * max(abs(bound), 1.0)
    if i_max > bound + slack:
        raise AssertionError(
            f"straight-path maximum {i_max:.12g} exceeds the closed-form "
            f"bound {bound:.12g}"
        )
    return t_max, float(bound)


def _golden_max(fun, lo: float, hi: float, tol: float) -> float:
    """Golden-section maximizer for a unimodal function on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


def calibrate_amplitude(
    bump: BumpSpec,
    spec: NonlinearitySpec,
    N: int,
    K: int,
    alpha: float,
    A: float,
    lambda_target: float = 8.0,
) -> BumpSpec:
    """Rescale the bump amplitude so the dilation factor at ``A`` hits a target.

    The energy ratio is strictly decreasing in the amplitude (the nonlinear
    mass grows super-quadratically while the quadratic terms grow like the
    amplitude squared), so the amplitude achieving
    ``lambda(A) = lambda_target`` is unique; it is found by bisection on the
    log-amplitude.  Requires ``lambda_target > 1``.
    """
    if not (lambda_target > 1.0):
        raise ValueError(f"lambda_target must exceed 1, got {lambda_target}")
    if alpha == 2.0:
        raise ValueError("the dilation construction requires alpha != 2")
    target = lambda_target**alpha if alpha < 2.0 else lambda_target**2

    def gap(log_amp: float) -> float:
        trial = bump.with_amplitude(math.exp(log_amp))
        return math.log(energy_ratio(trial, spec, N, K, alpha, A)) - math.log(target)

    # gap is strictly decreasing in log-amplitude: walk toward the sign change.
    x = math.log(bump.amplitude)
    g0 = gap(x)
    if g0 == 0.0:
        return bump
    step = 2.0
    lo, hi = x, x
    for _ in range(64):
        if g0 > 0.0:
            lo, hi = hi, hi + step
            if gap(hi) < 0.0:
                break
        else:
            lo, hi = lo - step, lo
            if gap(lo) > 0.0:
                break
    else:
        raise RuntimeError("could not bracket the target amplitude")
    root = brentq(gap, lo, hi, xtol=1e-12)
    return bump.with_amplitude(math.exp(root))
