"""Weighted grids, quadrature, norms, energies and gradients for the radial
and biradial symmetry reductions of the field equation
-(Laplacian u) + A |x|^(-alpha) u = f(u) on R^N.

Radial reduction: u(x) = u(r), r = |x|, so every volume integral carries the
surface factor sigma_N r^(N-1).  Biradial reduction for a split
R^N = R^K x R^(N-K): u(x) = u(s, t) with s = |y|, t = |z|, and the measure
factor sigma_K sigma_{N-K} s^(K-1) t^(N-K-1).

Design notes.

* Quadrature weights are moment-fitted per panel of four grid cells
  (five-point Lagrange stencils, panel moments computed by 16-point
  Gauss-Legendre), so weighted integrals of polynomials of degree <= 4 are
  exact to rounding, including the monomial measure factors.

* The Dirichlet energy uses face differences (equivalently, P1 finite
  elements): the squared slope on each interval times the exact slab mass
  of the measure.  A quadratic form built from centered *node* differences
  has sawtooth null modes, which makes descent methods diverge; the face
  form is coercive and makes the discrete energy exactly scale-covariant
  under u_lambda(x) = u(x/lambda) on the correspondingly scaled grid.

* Grids never place a node at the origin or on the coordinate axes, so the
  potential |x|^(-alpha) and the measure weights are evaluated only where
  they are finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.interpolate import BSpline
from scipy.sparse.linalg import splu

__all__ = [
    "RadialGrid",
    "BiradialGrid",
    "RadialProfile",
    "BiradialProfile",
    "radial_grid",
    "biradial_grid",
    "norm_A",
    "energy_and_gradient",
    "radialize",
    "lift_radial",
    "sphere_area",
]


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere S^(d-1) in R^d."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def _moment_row(stencil: np.ndarray, a: float, b: float, power: int) -> np.ndarray:
    """Integrals over [a, b] of the Lagrange basis on `stencil` times x^power.

    Exact (Gauss-Legendre, 16 points) because each integrand is a polynomial
    of degree len(stencil)-1+power <= 31.
    """
    x = 0.5 * (b - a) * _GL_X + 0.5 * (b + a)
    gw = 0.5 * (b - a) * _GL_W
    m = len(stencil)
    vals = np.empty((m, x.size))
    for k in range(m):
        num = np.ones_like(x)
        den = 1.0
        for j in range(m):
            if j != k:
                num *= x - stencil[j]
                den *= stencil[k] - stencil[j]
        vals[k] = num / den
    return vals @ (gw * x**power)


def _panel_weights(nodes: np.ndarray, edges: np.ndarray, power: int) -> np.ndarray:
    """Quadrature weights on `nodes` for integrals of g(x) x^power over
    [edges[0], edges[-1]], exact for g polynomial of degree <= 4.

    `edges` lists the breakpoints between consecutive coverage intervals
    (len(nodes)+1 entries for cell-centered grids, == nodes for node grids).
    Intervals are grouped into panels of up to four; each panel integrates
    the degree-4 Lagrange interpolant on five consecutive nodes.
    """
    n = len(nodes)
    if n < 5:
        raise ValueError(f"need at least 5 nodes per direction, got {n}")
    n_int = len(edges) - 1
    w = np.zeros(n)
    start = 0
    while start < n_int:
        stop = min(start + 4, n_int)
        # Five consecutive nodes whose hull contains [edges[start], edges[stop]].
        lo = min(max(start - (4 - (stop - start)) // 2, 0), n - 5)
        while lo + 4 < n - 1 and nodes[lo + 4] < edges[stop]:
            lo += 1
        while lo > 0 and nodes[lo] > edges[start]:
            lo -= 1
        stencil = nodes[lo : lo + 5]
        w[lo : lo + 5] += _moment_row(stencil, edges[start], edges[stop], power)
        start = stop
    return w


def _moment_correct(nodes: np.ndarray, w0: np.ndarray, power: int,
                    lo: float, hi: float) -> np.ndarray:
    """Mass-weighted minimum-norm correction of the positive base weights w0
    matching moments of the measure x^power over [lo, hi] exactly, at the
    highest degree <= 4 that keeps every weight positive (degree 0 is always
    exact for the bases used, so the ladder terminates positive)."""
    scale = hi
    for top in (4, 3, 2, 1, 0):
        deg = np.arange(top + 1)
        V = (nodes[:, None] / scale) ** deg[None, :]
        mom = (hi ** (power + 1 + deg) - lo ** (power + 1 + deg)) / (power + 1 + deg) / scale**deg
        G = V.T @ (w0[:, None] * V)
        c = np.linalg.solve(G, mom - V.T @ w0)
        w = w0 + w0 * (V @ c)
        if w.min() > 0.0:
            return w
    return w0


def _patch_weights(centers: np.ndarray, edges: np.ndarray, power: int) -> np.ndarray:
    """Positive weights on cell centers matching the measure moments of
    degree <= 4 exactly: per-cell masses plus the mass-weighted minimum-norm
    moment correction.  Used where interpolatory weights lose positivity
    (the measure x^power varies too fast across a panel near an axis)."""
    w0 = (edges[1:] ** (power + 1) - edges[:-1] ** (power + 1)) / (power + 1)
    return _moment_correct(centers, w0, power, edges[0], edges[-1])


def _node_weights(nodes: np.ndarray, power: int) -> np.ndarray:
    """Weights on a node grid (integration between first and last node).
    Interpolatory panels where they are positive; otherwise a linear-exact
    two-point split of each interval's measure mass, moment-corrected to
    degree-4 exactness (positive on any monotone grid of mild local ratio)."""
    w = _panel_weights(nodes, nodes, power)
    if w.min() > 0.0:
        return w
    a, b = nodes[:-1], nodes[1:]
    m0 = (b ** (power + 1) - a ** (power + 1)) / (power + 1)
    m1 = (b ** (power + 2) - a ** (power + 2)) / (power + 2)
    right = (m1 - a * m0) / (b - a)
    left = (b * m0 - m1) / (b - a)
    w0 = np.zeros(len(nodes))
    w0[:-1] += left
    w0[1:] += right
    return _moment_correct(nodes, w0, power, float(nodes[0]), float(nodes[-1]))


def _cell_weights(centers: np.ndarray, edges: np.ndarray, power: int) -> np.ndarray:
    """Positive quadrature weights on cell centers, exact for polynomials of
    degree <= 4 against the measure x^power.  Interpolatory panels where they
    are positive; otherwise the leading cells are replaced by the moment-
    matched patch (grown until the combined weight vector is positive)."""
    w = _panel_weights(centers, edges, power)
    if w.min() > 0.0:
        return w
    n = len(centers)
    q = 8
    while True:
        if q + 5 > n:
            q = n
        if q == n:
            w = _patch_weights(centers, edges, power)
        else:
            w = np.concatenate(
                [
                    _patch_weights(centers[:q], edges[: q + 1], power),
                    _panel_weights(centers[q:], edges[q:], power),
                ]
            )
        if w.min() > 0.0:
            return w
        if q == n:
            raise ValueError(
                f"could not construct positive weights for measure power {power} "
                f"on {n} cells; refine the grid"
            )
        q *= 2


@dataclass
class RadialGrid:
    """Log-spaced node grid on [r_min, r_max] for radial profiles.

    quad_weights include the full measure factor sigma_N r^(N-1); the face
    arrays carry the exact slab masses used by the Dirichlet form.
    """

    N: int
    r: np.ndarray
    quad_weights: np.ndarray
    face_mass: np.ndarray
    face_dr: np.ndarray
    r_min: float
    r_max: float
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def size(self) -> int:
        return len(self.r)


@dataclass
class BiradialGrid:
    """Cell-centered tensor grid on (s_lo, s_hi] x (t_lo, t_hi] for biradial
    profiles with split R^K x R^(N-K).

    quad_weights (2D) include sigma_K sigma_{N-K} s^(K-1) t^(N-K-1).  Face
    slab masses implement the Dirichlet form with even (Neumann) closure on
    the coordinate axes and zero-Dirichlet ghost values on the outer walls
    (and on inner walls when the span does not start at the axis).
    """

    N: int
    K: int
    s: np.ndarray
    t: np.ndarray
    s_weights: np.ndarray
    t_weights: np.ndarray
    quad_weights: np.ndarray
    rho: np.ndarray
    s_cell_mass: np.ndarray
    t_cell_mass: np.ndarray
    s_face_mass: np.ndarray
    t_face_mass: np.ndarray
    s_lo_wall_mass: float
    s_hi_wall_mass: float
    t_lo_wall_mass: float
    t_hi_wall_mass: float
    s_span: tuple[float, float]
    t_span: tuple[float, float]
    h_s: float
    h_t: float
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.s), len(self.t))


def radial_grid(N: int, r_max: float = 20.0, n: int = 2048, r_min: float | None = None) -> RadialGrid:
    """Log-spaced radial grid; r_min defaults to 1e-6 * r_max so the potential
    singularity at the origin is never sampled."""
    if N < 3:
        raise ValueError(f"N must be >= 3, got {N}")
    if r_max <= 0:
        raise ValueError(f"r_max must be positive, got {r_max}")
    if r_min is None:
        r_min = 1e-6 * r_max
    if not 0.0 < r_min < r_max:
        raise ValueError(f"need 0 < r_min < r_max, got r_min={r_min}, r_max={r_max}")
    r = np.geomspace(r_min, r_max, n)
    sig = sphere_area(N)
    w = sig * _node_weights(r, N - 1)
    face_mass = sig * (r[1:] ** N - r[:-1] ** N) / N
    face_dr = np.diff(r)
    return RadialGrid(
        N=N, r=r, quad_weights=w, face_mass=face_mass, face_dr=face_dr,
        r_min=float(r_min), r_max=float(r_max),
    )


def _axis_arrays(lo: float, hi: float, n: int, sig: float, power: int):
    h = (hi - lo) / n
    edges = lo + h * np.arange(n + 1)
    centers = lo + h * (np.arange(n) + 0.5)
    wq = sig * _cell_weights(centers, edges, power)
    cell_mass = sig * (edges[1:] ** (power + 1) - edges[:-1] ** (power + 1)) / (power + 1)
    face_mass = sig * (centers[1:] ** (power + 1) - centers[:-1] ** (power + 1)) / (power + 1)
    lo_wall = 0.0
    if lo > 0.0:
        lo_wall = sig * (centers[0] ** (power + 1) - lo ** (power + 1)) / (power + 1)
    hi_wall = sig * (hi ** (power + 1) - centers[-1] ** (power + 1)) / (power + 1)
    return h, centers, wq, cell_mass, face_mass, lo_wall, hi_wall


def biradial_grid(
    N: int,
    K: int,
    s_max: float = 20.0,
    t_max: float = 20.0,
    n_s: int = 128,
    n_t: int = 128,
    s_min: float = 0.0,
    t_min: float = 0.0,
) -> BiradialGrid:
    """Cell-centered biradial grid.  The spans may start away from the axes
    (s_min, t_min > 0) to resolve profiles supported in an annular box."""
    if not 2 <= K <= N - 2:
        raise ValueError(f"K must lie in [2, N-2] = [2, {N - 2}], got {K}")
    if not (0.0 <= s_min < s_max and 0.0 <= t_min < t_max):
        raise ValueError("spans must satisfy 0 <= min < max")
    h_s, s, ws, s_cell, s_face, s_lo_w, s_hi_w = _axis_arrays(
        s_min, s_max, n_s, sphere_area(K), K - 1
    )
    h_t, t, wt, t_cell, t_face, t_lo_w, t_hi_w = _axis_arrays(
        t_min, t_max, n_t, sphere_area(N - K), N - K - 1
    )
    if np.any(ws <= 0) or np.any(wt <= 0):
        raise ValueError("nonpositive quadrature weight; refine the grid")
    w2 = np.outer(ws, wt)
    rho = np.hypot(s[:, None], t[None, :])
    return BiradialGrid(
        N=N, K=K, s=s, t=t, s_weights=ws, t_weights=wt, quad_weights=w2, rho=rho,
        s_cell_mass=s_cell, t_cell_mass=t_cell,
        s_face_mass=s_face, t_face_mass=t_face,
        s_lo_wall_mass=s_lo_w, s_hi_wall_mass=s_hi_w,
        t_lo_wall_mass=t_lo_w, t_hi_wall_mass=t_hi_w,
        s_span=(float(s_min), float(s_max)), t_span=(float(t_min), float(t_max)),
        h_s=h_s, h_t=h_t,
    )


@dataclass
class RadialProfile:
    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.r.shape:
            raise ValueError(
                f"values shape {self.values.shape} does not match grid size {self.grid.r.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("profile values must be finite")

    @classmethod
    def from_callable(cls, grid: RadialGrid, fn) -> "RadialProfile":
        return cls(grid, np.asarray(fn(grid.r), dtype=float))


@dataclass
class BiradialProfile:
    grid: BiradialGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"values shape {self.values.shape} does not match grid shape {self.grid.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("profile values must be finite")

    @classmethod
    def from_callable(cls, grid: BiradialGrid, fn) -> "BiradialProfile":
        return cls(grid, np.asarray(fn(grid.s[:, None], grid.t[None, :]), dtype=float))


def _grad_quadratic_radial(grid: RadialGrid, u: np.ndarray) -> float:
    slopes = np.diff(u) / grid.face_dr
    return float(np.sum(grid.face_mass * slopes**2))


def _grad_quadratic_biradial(grid: BiradialGrid, u: np.ndarray) -> float:
    ds = np.diff(u, axis=0) / grid.h_s
    dt = np.diff(u, axis=1) / grid.h_t
    total = float(np.einsum("i,ij,j->", grid.s_face_mass, ds**2, grid.t_cell_mass))
    total += float(np.einsum("i,ij,j->", grid.s_cell_mass, dt**2, grid.t_face_mass))
    half_s = 0.5 * grid.h_s
    half_t = 0.5 * grid.h_t
    total += grid.s_hi_wall_mass * float(np.sum(grid.t_cell_mass * (u[-1, :] / half_s) ** 2))
    total += grid.t_hi_wall_mass * float(np.sum(grid.s_cell_mass * (u[:, -1] / half_t) ** 2))
    if grid.s_lo_wall_mass > 0.0:
        total += grid.s_lo_wall_mass * float(np.sum(grid.t_cell_mass * (u[0, :] / half_s) ** 2))
    if grid.t_lo_wall_mass > 0.0:
        total += grid.t_lo_wall_mass * float(np.sum(grid.s_cell_mass * (u[:, 0] / half_t) ** 2))
    return total


def _potential_weight(grid, alpha: float) -> np.ndarray:
    if isinstance(grid, RadialGrid):
        return grid.quad_weights * grid.r ** (-alpha)
    return grid.quad_weights * grid.rho ** (-alpha)


def norm_A(profile, A: float, alpha: float) -> tuple[float, float, float]:
    """Split squared norm of a profile: (grad_part, pot_part, norm_sq) with
    grad_part = integral of |grad u|^2, pot_part = A * integral of |x|^(-alpha) u^2,
    norm_sq their sum."""
    if A <= 0:
        raise ValueError(f"A must be positive, got {A}")
    u = profile.values
    grid = profile.grid
    if isinstance(profile, RadialProfile):
        grad_part = _grad_quadratic_radial(grid, u)
    else:
        grad_part = _grad_quadratic_biradial(grid, u)
    pot_part = A * float(np.sum(_potential_weight(grid, alpha) * u**2))
    return grad_part, pot_part, grad_part + pot_part


def _stiffness_1d(face_mass: np.ndarray, h: float, lo_wall: float, hi_wall: float, n: int):
    """Tridiagonal 1D Dirichlet-form matrix from face slab masses."""
    c = face_mass / h**2
    diag = np.zeros(n)
    diag[:-1] += c
    diag[1:] += c
    half = 0.5 * h
    diag[-1] += hi_wall / half**2
    if lo_wall > 0.0:
        diag[0] += lo_wall / half**2
    return sparse.diags([-c, diag, -c], offsets=[-1, 0, 1], format="csr")


def _assemble_operator(grid, A: float, alpha: float):
    """Sparse SPD matrix B with u.B.u = ||u||_A^2, plus its LU factorization.
    Cached on the grid keyed by (A, alpha)."""
    key = ("B", float(A), float(alpha))
    if key in grid._cache:
        return grid._cache[key]
    pot = A * _potential_weight(grid, alpha)
    if isinstance(grid, RadialGrid):
        n = grid.size
        c = grid.face_mass / grid.face_dr**2
        diag = np.zeros(n)
        diag[:-1] += c
        diag[1:] += c
        T = sparse.diags([-c, diag, -c], offsets=[-1, 0, 1], format="csr")
        B = (T + sparse.diags(pot)).tocsc()
    else:
        n_s, n_t = grid.shape
        Ts = _stiffness_1d(grid.s_face_mass, grid.h_s, grid.s_lo_wall_mass, grid.s_hi_wall_mass, n_s)
        Tt = _stiffness_1d(grid.t_face_mass, grid.h_t, grid.t_lo_wall_mass, grid.t_hi_wall_mass, n_t)
        K2 = sparse.kron(Ts, sparse.diags(grid.t_cell_mass)) + sparse.kron(
            sparse.diags(grid.s_cell_mass), Tt
        )
        B = (K2 + sparse.diags(pot.ravel())).tocsc()
    lu = splu(B)
    grid._cache[key] = (B, lu)
    return B, lu


def energy_and_gradient(profile, spec, A: float, alpha: float):
    """Free energy I(u) = 1/2 ||u||_A^2 - integral F(u), its quadrature-weighted
    gradient (same shape as the profile), and the dual residual norm
    sqrt(g . B^{-1} g), where B is the ||.||_A quadratic form.

    Raises FloatingPointError when F(u) overflows (diverged energy).
    """
    u = profile.values
    grid = profile.grid
    grad_part, pot_part, norm_sq = norm_A(profile, A, alpha)
    w = grid.quad_weights
    Fu = spec.F(u)
    mass = float(np.sum(w * Fu))
    if not np.isfinite(mass):
        raise FloatingPointError("diverged energy: F(u) overflowed on the grid")
    I = 0.5 * norm_sq - mass
    B, lu = _assemble_operator(grid, A, alpha)
    g = B @ u.ravel() - (w * spec.f(u)).ravel()
    if not np.all(np.isfinite(g)):
        raise FloatingPointError("diverged energy: f(u) overflowed on the grid")
    residual = float(math.sqrt(max(g @ lu.solve(g), 0.0)))
    return I, g.reshape(u.shape), residual


def _radial_basis(grid: BiradialGrid, n_basis: int):
    """Clamped cubic B-spline design matrix on node radii; cached per grid."""
    key = ("basis", n_basis)
    if key in grid._cache:
        return grid._cache[key]
    rho = grid.rho.ravel()
    hi = float(rho.max()) * (1.0 + 1e-12)
    inner = np.linspace(0.0, hi, n_basis - 2)
    knots = np.concatenate([[0.0] * 3, inner, [hi] * 3])
    design = BSpline.design_matrix(rho, knots, 3).toarray()
    grid._cache[key] = (knots, design)
    return knots, design


def _fit_radial(grid: BiradialGrid, values: np.ndarray, n_basis: int):
    nb = min(n_basis, max(8, grid.rho.size // 4))
    knots, design = _radial_basis(grid, nb)
    sw = np.sqrt(grid.quad_weights.ravel())
    coef, *_ = np.linalg.lstsq(design * sw[:, None], values.ravel() * sw, rcond=None)
    return knots, design, coef


def radialize(profile: BiradialProfile, A: float = 1.0, alpha: float = 1.0,
              n_basis: int = 120, n_radial: int = 512):
    """Split a biradial profile into its radial part and a nonradiality index.

    The radial part is the weighted projection of the nodal values onto a
    radial spline space, i.e. the discrete measure-weighted angular average
    as a function of rho = sqrt(s^2 + t^2); nonradiality is
    ||u - lift(radial_part)||_A / ||u||_A, zero for radial data and for the
    zero profile.
    """
    grid = profile.grid
    u = profile.values.ravel()
    knots, design, coef = _fit_radial(grid, profile.values, n_basis)
    spline = BSpline(knots, coef, 3, extrapolate=False)

    rho_hi = float(grid.rho.max())
    rg = radial_grid(grid.N, r_max=rho_hi, n=n_radial, r_min=max(1e-6 * rho_hi, 1e-300))
    radial_vals = np.nan_to_num(spline(np.minimum(rg.r, rho_hi)), nan=0.0)
    radial_part = RadialProfile(rg, radial_vals)

    lifted = design @ coef
    diff = BiradialProfile(grid, (u - lifted).reshape(grid.shape))
    _, _, diff_sq = norm_A(diff, A, alpha)
    _, _, norm_sq = norm_A(profile, A, alpha)
    nonradiality = 0.0 if norm_sq == 0.0 else float(math.sqrt(diff_sq / norm_sq))
    return radial_part, min(nonradiality, 1.0)


def lift_radial(profile: BiradialProfile, n_basis: int = 120) -> BiradialProfile:
    """The radial projection of a biradial profile, lifted back onto the same
    biradial grid (the complement of the residual measured by radialize)."""
    grid = profile.grid
    _, design, coef = _fit_radial(grid, profile.values, n_basis)
    return BiradialProfile(grid, (design @ coef).reshape(grid.shape))
