"""Mountain-pass solver on symmetry-reduced biradial profiles.

The functional ``I(u) = |u|_A^2 / 2 - int F(u)`` restricted to biradial
profiles has mountain-pass geometry once a profile ``ubar`` with
``I(ubar) < 0`` is available (see :func:`singwell.testfunction.build_ubar`).
This module

* computes the small-sphere energy floor that certifies the geometry
  (:func:`mountain_pass_floor`),
* deforms a discrete path from 0 to ``ubar`` by preconditioned steepest
  descent at the maximal-energy node until the dual residual there drops
  below tolerance, then polishes the maximizer with a damped Newton
  iteration (:func:`mpa_solve`),
* verifies candidate solutions in weak form (:func:`verify_solution`),
* sweeps the coupling ``A`` and tabulates the separation between the
  nonradial level estimate and the certified radial floor
  (:func:`separation_check`), and
* measures distances between solutions living on different grids
  (:func:`profile_distance`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.interpolate import RegularGridInterpolator
from scipy.optimize import brentq
from scipy.sparse.linalg import splu

from singwell.discretization import (
    BiradialGrid,
    BiradialProfile,
    _assemble_operator,
    biradial_grid,
    norm_A,
    radial_grid,
    radialize,
)
from singwell.exponents import ProblemParams, critical_exponents, level_exponents
from singwell.nonlinearity import NonlinearitySpec
from singwell.radial_solver import (
    chain_constants,
    default_trial_family,
    estimate_mA,
    fibering_max,
    sobolev_constant,
)
from singwell.testfunction import BumpSpec, path_upper_bound

__all__ = [
    "MountainPassPath",
    "SolutionRecord",
    "SeparationRow",
    "SeparationTable",
    "mountain_pass_floor",
    "negative_energy_endpoint",
    "mpa_solve",
    "verify_solution",
    "separation_check",
    "profile_distance",
]


# --------------------------------------------------------------------------
# Records
# --------------------------------------------------------------------------

@dataclass
class MountainPassPath:
    """Discrete path of biradial profiles from 0 to ubar with node energies."""

    profiles: list[BiradialProfile]
    energies: np.ndarray

    def __post_init__(self) -> None:
        self.energies = np.asarray(self.energies, dtype=float)
        if len(self.profiles) != self.energies.size:
            raise ValueError("one energy per path node required")
        if len(self.profiles) < 3:
            raise ValueError("a path needs at least 3 nodes")
        if not np.all(np.isfinite(self.energies)):
            raise ValueError("path energies must be finite")
        if np.any(np.abs(self.profiles[0].values) > 0.0):
            raise ValueError("path must start at the zero profile")
        if not (self.energies[-1] < 0.0):
            raise ValueError(
                f"path must end below zero energy, got I = {self.energies[-1]}"
            )


@dataclass
class SolutionRecord:
    """Converged (or best-effort) output of one mountain-pass run."""

    u_K: BiradialProfile
    level: float
    residual: float  # dual residual relative to |u_K|_A
    nonradiality: float
    K: int
    A: float
    converged: bool
    iterations: int
    tol: float
    flags: tuple[str, ...] = ()
    # [0] = undeformed-path sampled maximum (explicit level upper bound),
    # then the path maximum after each completed deformation sweep
    path_max_history: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.converged:
            if not (self.level > 0.0):
                raise ValueError(f"converged level must be positive, got {self.level}")
            if not (self.residual < self.tol):
                raise ValueError(
                    f"converged residual {self.residual} is not below tol {self.tol}"
                )
            if float(np.min(self.u_K.values)) < -1e-10:
                raise ValueError(
                    "converged solution has negative nodal values below -1e-10"
                )


# --------------------------------------------------------------------------
# Energy helpers in nodal coordinates
# --------------------------------------------------------------------------

class _Workspace:
    """Per-(grid, A, alpha) cache: SPD form B, its LU, quadrature weights."""

    def __init__(self, grid: BiradialGrid, spec: NonlinearitySpec, A: float, alpha: float):
        self.grid = grid
        self.spec = spec
        self.A = A
        self.alpha = alpha
        self.B, self.lu = _assemble_operator(grid, A, alpha)
        self.w = grid.quad_weights.ravel()

    def energy(self, u: np.ndarray) -> float:
        Fu = self.spec.F(u)
        mass = float(np.sum(self.w * Fu))
        if not math.isfinite(mass):
            raise FloatingPointError("diverged energy: F(u) overflowed on the grid")
        return 0.5 * float(u @ (self.B @ u)) - mass

    def gradient(self, u: np.ndarray) -> np.ndarray:
        return self.B @ u - self.w * self.spec.f(u)

    def norm(self, u: np.ndarray) -> float:
        return math.sqrt(max(float(u @ (self.B @ u)), 0.0))

    def dual_direction(self, g: np.ndarray) -> tuple[np.ndarray, float]:
        """Preconditioned direction d = B^{-1} g and the dual norm sqrt(g.d)."""
        d = self.lu.solve(g)
        return d, math.sqrt(max(float(g @ d), 0.0))


def _respace_by_arclength(nodes: list[np.ndarray], ws: _Workspace) -> list[np.ndarray]:
    """Re-space path nodes uniformly in |.|_A arclength (endpoints fixed)."""
    P = len(nodes)
    seg = np.array([ws.norm(nodes[k + 1] - nodes[k]) for k in range(P - 1)])
    total = float(seg.sum())
    if total <= 0.0:
        return nodes
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    targets = np.linspace(0.0, total, P)
    out = [nodes[0]]
    for m in range(1, P - 1):
        p = targets[m]
        k = int(np.searchsorted(cum, p, side="right") - 1)
        k = min(max(k, 0), P - 2)
        frac = 0.0 if seg[k] == 0.0 else (p - cum[k]) / seg[k]
        out.append(nodes[k] + frac * (nodes[k + 1] - nodes[k]))
    out.append(nodes[-1])
    return out


def _descend_node(
    u: np.ndarray,
    e_u: float,
    ws: _Workspace,
    tangent: np.ndarray | None,
    tau_init: float,
) -> tuple[np.ndarray, float, float, float]:
    """One Armijo-backtracked preconditioned descent step at a path node.

    Returns (new_u, new_energy, accepted_tau, dual_norm).  The direction is
    the |.|_A-metric gradient with its component along the path tangent
    removed (unless nearly parallel, where sliding is all there is).
    """
    g = ws.gradient(u)
    d, dual = ws.dual_direction(g)
    if dual == 0.0:
        return u, e_u, tau_init, 0.0
    if tangent is not None:
        bt = ws.B @ tangent
        tt = float(tangent @ bt)
        if tt > 0.0:
            coef = float(d @ bt) / tt
            cos_sq = coef * coef * tt / dual**2
            if cos_sq < 0.99:
                d = d - coef * tangent
    slope = float(g @ d)
    if slope <= 0.0:
        d = ws.lu.solve(g)
        slope = dual * dual
    tau = min(max(tau_init, 1e-12), 1.0)
    for _ in range(60):
        trial = u - tau * d
        e_trial = ws.energy(trial)
        if e_trial <= e_u - 1e-4 * tau * slope:
            return trial, e_trial, tau, dual
        tau *= 0.5
    return u, e_u, tau, dual


def _parabolic_refine(
    nodes: list[np.ndarray], energies: np.ndarray, j: int, ws: _Workspace
) -> tuple[list[np.ndarray], np.ndarray, int]:
    """Replace node j by the parabola-vertex blend with a neighbor when that
    raises its energy (sharpens the discrete maximum before descending it)."""
    if not (0 < j < len(nodes) - 1):
        return nodes, energies, j
    e_m, e_0, e_p = energies[j - 1], energies[j], energies[j + 1]
    denom = e_m - 2.0 * e_0 + e_p
    if denom >= 0.0:
        return nodes, energies, j
    delta = 0.5 * (e_m - e_p) / denom
    delta = float(np.clip(delta, -0.5, 0.5))
    if abs(delta) < 1e-3:
        return nodes, energies, j
    k = j + 1 if delta > 0 else j - 1
    blend = nodes[j] + abs(delta) * (nodes[k] - nodes[j])
    e_blend = ws.energy(blend)
    if e_blend > e_0:
        nodes = list(nodes)
        nodes[j] = blend
        energies = energies.copy()
        energies[j] = e_blend
    return nodes, energies, j


# --------------------------------------------------------------------------
# Mountain-pass geometry floor
# --------------------------------------------------------------------------

def mountain_pass_floor(
    grid: BiradialGrid,
    spec: NonlinearitySpec,
    params: ProblemParams,
    n_samples: int = 32,
    seed: int = 0,
) -> dict:
    """Small-sphere floor of the energy: the certified radius and level.

    From ``F(s) <= M2 min(s^p1, s^p2) <= M2 s^(2*)`` and the Sobolev bound,
    ``I(u) >= |u|_A^2/2 - M2 S_N^(2*) |u|_A^(2*)``; the right side is
    maximized at ``R = (1/(2* C))^(1/(2*-2))`` with value
    ``R^2 (1/2 - 1/2*) > 0``.  Returns the radius, the certified floor, and
    the sampled minimum of ``I`` over ``n_samples`` random nonnegative
    profiles normalized to ``|u|_A = R`` (an illustration that the sphere
    infimum stays positive, not a certificate).
    """
    N, alpha, A = params.N, params.alpha, params.A
    if not (2.0 < spec.p1 < 2.0 * N / (N - 2.0) < spec.p2):
        raise ValueError(
            "the small-sphere floor needs p1 < 2N/(N-2) < p2 so that the "
            "double-power envelope is dominated by the critical power"
        )
    two_star = 2.0 * N / (N - 2.0)
    C = spec.M2 * sobolev_constant(N) ** two_star
    R = (1.0 / (two_star * C)) ** (1.0 / (two_star - 2.0))
    floor = R**2 * (0.5 - 1.0 / two_star)

    ws = _Workspace(grid, spec, A, alpha)
    rng = np.random.default_rng(seed)
    s_lo, s_hi = grid.s_span
    t_lo, t_hi = grid.t_span
    sample_min = math.inf
    for _ in range(n_samples):
        vals = np.zeros(grid.shape)
        for _ in range(int(rng.integers(1, 4))):
            cs = rng.uniform(s_lo + 0.15 * (s_hi - s_lo), s_hi - 0.15 * (s_hi - s_lo))
            ct = rng.uniform(t_lo + 0.15 * (t_hi - t_lo), t_hi - 0.15 * (t_hi - t_lo))
            width = rng.uniform(0.05, 0.25) * min(s_hi - s_lo, t_hi - t_lo)
            vals += rng.uniform(0.2, 1.0) * np.exp(
                -(((grid.s[:, None] - cs) ** 2 + (grid.t[None, :] - ct) ** 2) / width**2)
            )
        u = vals.ravel()
        nrm = ws.norm(u)
        if nrm == 0.0:
            continue
        sample_min = min(sample_min, ws.energy(u * (R / nrm)))
    return {
        "R": R,
        "provable_floor": floor,
        "sample_min": sample_min,
        "n_samples": n_samples,
    }


def negative_energy_endpoint(
    grid: BiradialGrid,
    spec: NonlinearitySpec,
    A: float,
    alpha: float,
    center: tuple[float, float] | None = None,
    width: float | None = None,
    safety: float = 1.3,
) -> BiradialProfile:
    """A path endpoint with I(ubar) < 0 at the solution's natural scale.

    Takes a smooth torus bump in the (s, t) half-plane and rides its
    fibering ray past the zero of ``g(t) = I(t v)``: superquadratic growth
    of F guarantees the zero exists, and ``safety`` times that ray parameter
    lands strictly below zero energy.  The resulting endpoint keeps the
    straight path's energy hump mid-path where 33 nodes resolve it.
    """
    if safety <= 1.0:
        raise ValueError(f"safety must exceed 1, got {safety}")
    s_lo, s_hi = grid.s_span
    t_lo, t_hi = grid.t_span
    if center is None:
        center = (s_lo + 0.45 * (s_hi - s_lo), t_lo + 0.45 * (t_hi - t_lo))
    if width is None:
        width = 0.12 * min(s_hi - s_lo, t_hi - t_lo)
    vals = np.exp(
        -(
            ((grid.s[:, None] - center[0]) ** 2 + (grid.t[None, :] - center[1]) ** 2)
            / width**2
        )
    )
    v = BiradialProfile(grid, vals)
    fib = fibering_max(v, spec, A, alpha)
    ws = _Workspace(grid, spec, A, alpha)
    ray = vals.ravel()

    def g(t: float) -> float:
        return ws.energy(t * ray)

    t_hi_scan = fib.t_u
    for _ in range(200):
        t_hi_scan *= 2.0
        if g(t_hi_scan) < 0.0:
            break
    else:
        raise RuntimeError("fibering ray never reaches negative energy")
    t_zero = brentq(g, fib.t_u, t_hi_scan, xtol=1e-12 * t_hi_scan)
    ubar = BiradialProfile(grid, (safety * t_zero) * vals)
    if ws.energy(ubar.values.ravel()) >= 0.0:
        raise RuntimeError("endpoint energy not negative after safety scaling")
    return ubar


# --------------------------------------------------------------------------
# Mountain-pass algorithm
# --------------------------------------------------------------------------

def _nehari_project(u: np.ndarray, ws: _Workspace, t_hint: float = 1.0) -> tuple[np.ndarray, float]:
    """Scale u onto the Nehari set: find t with d/dt I(t u) = 0, return (t u, t).

    Monotonicity of f(s)/s makes the zero of ``h(t) = t |u|_A^2 - int f(tu)u``
    unique; it is bracketed by doubling/halving around the hint."""
    a = float(u @ (ws.B @ u))
    if a <= 0.0:
        raise ValueError("cannot project the zero profile onto the Nehari set")

    def h(t: float) -> float:
        return t * a - float(np.sum(ws.w * ws.spec.f(t * u) * u))

    lo = hi = max(t_hint, 1e-12)
    if h(hi) > 0.0:
        for _ in range(200):
            hi *= 2.0
            if h(hi) <= 0.0:
                break
        else:
            raise RuntimeError("Nehari projection found no sign change upward")
        lo = hi / 2.0
    else:
        for _ in range(200):
            lo *= 0.5
            if h(lo) >= 0.0:
                break
        else:
            raise RuntimeError("Nehari projection found no sign change downward")
        hi = lo * 2.0
    t_star = brentq(h, lo, hi, xtol=1e-14 * hi, rtol=8.9e-16)
    return t_star * u, t_star


def _nehari_descend(
    u: np.ndarray, ws: _Workspace, tol_target: float, max_steps: int = 1500
) -> tuple[np.ndarray, float]:
    """Minimize I over the Nehari set by projected preconditioned descent.

    The fibering maximum is unique along every ray, so minimizing the
    ray-projected energy is an unconstrained minimization whose local minima
    are mountain-pass critical points -- descent cannot stall on the saddle's
    unstable direction because the projection removes it.  The step length
    grows geometrically while accepted so soft near-translation modes are
    traversed quickly."""
    cur, _ = _nehari_project(u, ws)
    e_cur = ws.energy(cur)
    tau = 1.0
    rel = math.inf
    for _ in range(max_steps):
        g = ws.gradient(cur)
        d, dual = ws.dual_direction(g)
        rel = dual / max(ws.norm(cur), 1e-300)
        if rel < tol_target:
            break
        accepted = False
        tau = min(tau * 2.0, 256.0)
        for _ in range(60):
            trial, _ = _nehari_project(cur - tau * d, ws)
            e_trial = ws.energy(trial)
            if e_trial <= e_cur - 1e-4 * tau * dual * dual:
                cur, e_cur = trial, e_trial
                accepted = True
                break
            tau *= 0.5
        if not accepted:
            break
    return cur, rel


def _newton_polish(
    u: np.ndarray, ws: _Workspace, max_steps: int = 30
) -> tuple[np.ndarray, float]:
    """Damped Newton on the stationarity system B u = w f(u).

    Returns the polished nodal vector and its relative dual residual.  Each
    step solves (B - diag(w f'(u))) delta = -g with the step length capped in
    the |.|_A trust region and halved until the dual residual decreases.
    Falls back to the input when no progress."""
    if ws.spec.fprime is None:
        g = ws.gradient(u)
        _, dual = ws.dual_direction(g)
        return u, dual / max(ws.norm(u), 1e-300)

    def rel_dual(vec: np.ndarray) -> float:
        g = ws.gradient(vec)
        _, dual = ws.dual_direction(g)
        return dual / max(ws.norm(vec), 1e-300)

    best_u, best_res = u, rel_dual(u)
    cur = best_u
    for _ in range(max_steps):
        g = ws.gradient(cur)
        J = ws.B - sparse.diags(ws.w * ws.spec.fprime(cur))
        try:
            delta = splu(J.tocsc()).solve(-g)
        except RuntimeError:  # singular Jacobian
            break
        norm_cur = ws.norm(cur)
        norm_delta = ws.norm(delta)
        step = 1.0
        if norm_delta > 0.25 * norm_cur:  # trust region in the energy metric
            step = 0.25 * norm_cur / norm_delta
        improved = False
        for _ in range(20):
            trial = cur + step * delta
            res = rel_dual(trial)
            if res < best_res:
                cur, best_u, best_res = trial, trial, res
                improved = True
                break
            step *= 0.5
        if not improved or best_res < 1e-13:
            break
    return best_u, best_res


def mpa_solve(
    ubar: BiradialProfile,
    spec: NonlinearitySpec,
    params: ProblemParams,
    tol: float = 1e-6,
    max_iter: int = 10_000,
    n_path: int = 33,
    n_starts: int = 2,
    seed: int = 0,
) -> SolutionRecord:
    """Mountain-pass solve: deform the straight path 0 -> ubar to a critical point.

    The discrete path (``n_path`` >= 33 nodes) is initialized as the straight
    segment ``t ubar``; each iteration re-spaces it by |.|_A arclength,
    sharpens the maximal-energy node by parabolic refinement, and applies one
    Armijo-backtracked preconditioned steepest-descent step to that node.
    Convergence is declared when the dual residual at the path maximum drops
    below ``tol`` relative to the profile norm; the maximizer is then
    polished by a damped Newton iteration.  ``n_starts`` deterministic
    starts (the straight path plus seeded smooth bends) are run and the
    lowest converged level is returned; a spread above 5% between converged
    starts is flagged ``multistart-spread``.

    Non-convergence after ``max_iter`` sweeps returns the best record
    flagged ``non-converged``; an initial path whose interior maximum is
    not positive returns a record flagged ``degenerate-geometry``.
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    if n_path < 33:
        raise ValueError(f"n_path must be at least 33, got {n_path}")
    grid = ubar.grid
    if not isinstance(grid, BiradialGrid):
        raise TypeError("mpa_solve requires a biradial ubar")
    if grid.N != params.N or grid.K != params.K:
        raise ValueError(
            f"grid symmetry (N={grid.N}, K={grid.K}) does not match params "
            f"(N={params.N}, K={params.K})"
        )
    ws = _Workspace(grid, spec, params.A, params.alpha)
    ub = ubar.values.ravel()
    e_ubar = ws.energy(ub)
    if not (e_ubar < 0.0):
        raise ValueError(f"mpa_solve requires I(ubar) < 0, got {e_ubar}")

    rng = np.random.default_rng(seed)
    records: list[SolutionRecord] = []
    for start in range(n_starts):
        thetas = np.linspace(0.0, 1.0, n_path)
        nodes = [th * ub for th in thetas]
        if start > 0:
            # deterministic smooth bend: push interior nodes along a seeded
            # bump profile, strongest mid-path
            bump = np.zeros(grid.shape)
            cs = rng.uniform(*grid.s_span)
            ct = rng.uniform(*grid.t_span)
            width = 0.25 * min(
                grid.s_span[1] - grid.s_span[0], grid.t_span[1] - grid.t_span[0]
            )
            bump += np.exp(
                -(((grid.s[:, None] - cs) ** 2 + (grid.t[None, :] - ct) ** 2) / width**2)
            )
            bump = bump.ravel() * (0.1 * ws.norm(ub) / max(ws.norm(bump.ravel()), 1e-300))
            for m in range(1, n_path - 1):
                nodes[m] = nodes[m] + math.sin(math.pi * thetas[m]) * bump
        energies = np.array([ws.energy(v) for v in nodes])

        if float(energies.max()) <= 0.0:
            records.append(
                SolutionRecord(
                    u_K=BiradialProfile(grid, nodes[int(np.argmax(energies))].reshape(grid.shape)),
                    level=float(energies.max()),
                    residual=math.inf,
                    nonradiality=0.0,
                    K=params.K,
                    A=params.A,
                    converged=False,
                    iterations=0,
                    tol=tol,
                    flags=("degenerate-geometry",),
                )
            )
            continue

        tau_warm = 1.0
        # history[0] is the undeformed path's sampled maximum (the explicit
        # upper bound on the level); each later entry is the maximum after
        # one completed deformation sweep
        max_history = [float(energies.max())]
        converged = False
        dual_rel = math.inf
        iterations = 0
        refine_trigger = max(10.0 * tol, 5e-2)
        refine_budget = 6
        best_seen = math.inf
        last_improve = 0
        u_polished: np.ndarray | None = None
        for it in range(max_iter):
            iterations = it + 1
            nodes = _respace_by_arclength(nodes, ws)
            energies = np.array([ws.energy(v) for v in nodes])
            j = 1 + int(np.argmax(energies[1:-1]))
            nodes, energies, j = _parabolic_refine(nodes, energies, j, ws)
            sweep_start_max = float(energies.max())

            tangent = nodes[j + 1] - nodes[j - 1]
            u_j = nodes[j]
            g = ws.gradient(u_j)
            _, dual = ws.dual_direction(g)
            dual_rel = dual / max(ws.norm(u_j), 1e-300)
            if dual_rel < tol:
                converged = True
                break
            if dual_rel < 0.9 * best_seen:
                best_seen = dual_rel
                last_improve = it
            stalled = it - last_improve >= 40
            if (dual_rel < refine_trigger or stalled) and refine_budget > 0:
                # The path phase has localized the saddle but descent alone
                # cannot converge onto it.  The fibering maximum is unique
                # along every ray, so the saddle is a *minimizer* of the
                # ray-projected energy: descend that reduced functional,
                # then finish with damped Newton.
                refine_budget -= 1
                cand, cand_rel = _nehari_descend(u_j, ws, max(tol, 1e-8))
                if cand_rel >= tol:
                    cand, cand_rel = _newton_polish(cand, ws)
                if cand_rel < tol:
                    converged = True
                    u_polished = cand
                    dual_rel = cand_rel
                    break
                refine_trigger = min(refine_trigger, dual_rel / 3.0)
                last_improve = it

            new_u, new_e, tau_warm, _ = _descend_node(
                u_j, energies[j], ws, tangent, min(tau_warm * 2.0, 1.0)
            )
            nodes[j] = new_u
            energies[j] = new_e

            # fix-up: keep the nodal maximum monotone (respacing and the
            # parabolic refine may reveal interior maxima of the polyline,
            # so the reference is the best maximum recorded so far)
            ref_max = min(sweep_start_max, max_history[-1])
            guard = 0
            while float(energies.max()) > ref_max + 1e-12 * max(
                1.0, abs(ref_max)
            ) and guard < 8:
                jj = 1 + int(np.argmax(energies[1:-1]))
                nodes[jj], energies[jj], tau_warm, _ = _descend_node(
                    nodes[jj], energies[jj], ws, nodes[jj + 1] - nodes[jj - 1], tau_warm
                )
                guard += 1
            max_history.append(float(energies.max()))

        flags: list[str] = []
        if u_polished is not None:
            u_best = u_polished
        else:
            j = 1 + int(np.argmax(energies[1:-1]))
            u_best = nodes[j]
            if converged:
                u_best, polished_rel = _newton_polish(u_best, ws)
                dual_rel = min(dual_rel, polished_rel)
        if not converged:
            flags.append("non-converged")
        level = ws.energy(u_best)
        profile = BiradialProfile(grid, u_best.reshape(grid.shape))
        if converged:
            # the polished solution is nonnegative up to solver noise;
            # clip nothing, record as-is
            _, nonrad = radialize(profile, params.A, params.alpha)
        else:
            nonrad = 0.0
        records.append(
            SolutionRecord(
                u_K=profile,
                level=float(level),
                residual=float(dual_rel),
                nonradiality=float(nonrad),
                K=params.K,
                A=params.A,
                converged=converged,
                iterations=iterations,
                tol=tol,
                flags=tuple(flags),
                path_max_history=np.array(max_history),
            )
        )

    converged_recs = [r for r in records if r.converged]
    if not converged_recs:
        return records[0]
    best = min(converged_recs, key=lambda r: r.level)
    if len(converged_recs) > 1:
        levels = [r.level for r in converged_recs]
        spread = (max(levels) - min(levels)) / max(abs(min(levels)), 1e-300)
        if spread > 0.05:
            best = SolutionRecord(
                u_K=best.u_K,
                level=best.level,
                residual=best.residual,
                nonradiality=best.nonradiality,
                K=best.K,
                A=best.A,
                converged=best.converged,
                iterations=best.iterations,
                tol=best.tol,
                flags=best.flags + ("multistart-spread",),
                path_max_history=best.path_max_history,
            )
    return best


# --------------------------------------------------------------------------
# Verification
# --------------------------------------------------------------------------

def _random_test_function(grid: BiradialGrid, rng: np.random.Generator) -> np.ndarray:
    """Random smooth bump vanishing at the outer walls (compact support)."""
    s_lo, s_hi = grid.s_span
    t_lo, t_hi = grid.t_span
    cs = rng.uniform(s_lo + 0.1 * (s_hi - s_lo), s_hi - 0.2 * (s_hi - s_lo))
    ct = rng.uniform(t_lo + 0.1 * (t_hi - t_lo), t_hi - 0.2 * (t_hi - t_lo))
    width = rng.uniform(0.05, 0.2) * min(s_hi - s_lo, t_hi - t_lo)
    v = np.exp(
        -(((grid.s[:, None] - cs) ** 2 + (grid.t[None, :] - ct) ** 2) / width**2)
    )
    # taper to zero at the outer walls so the support is numerically compact
    taper_s = np.clip((s_hi - grid.s) / (0.1 * (s_hi - s_lo)), 0.0, 1.0)
    taper_t = np.clip((t_hi - grid.t) / (0.1 * (t_hi - t_lo)), 0.0, 1.0)
    return (v * taper_s[:, None] * taper_t[None, :]).ravel()


def verify_solution(
    record: SolutionRecord,
    spec: NonlinearitySpec,
    params: ProblemParams,
    n_tests: int = 20,
    seed: int = 0,
) -> dict:
    """Weak-form and structural verification of a converged record.

    Checks (each an entry ``name -> (passed, value, threshold)``):

    * ``weak_form``      -- |<I'(u), v>| <= tol |u|_A |v|_A for ``n_tests``
      random smooth compactly-supported v;
    * ``nehari``         -- the v = u case: | |u|_A^2 - int f(u)u | <= tol |u|_A^2;
    * ``negative_part``  -- |u^-|_A <= 1e-8 |u|_A;
    * ``negative_identity`` -- int f(u) u^- = 0 exactly (truncation) and
      <I'(u), u^-> matches |u^-|_A^2 up to discretization noise;
    * ``energy_recompute`` -- recomputed I(u) matches the recorded level to
      1e-10 relative;
    * ``locality``       -- a test bump supported where u is negligible
      contributes only quadrature noise.
    """
    if not record.converged:
        raise ValueError("verify_solution requires a converged record")
    grid = record.u_K.grid
    ws = _Workspace(grid, spec, params.A, params.alpha)
    u = record.u_K.values.ravel()
    g = ws.gradient(u)
    norm_u = ws.norm(u)
    tol = record.tol
    rng = np.random.default_rng(seed)
    checks: dict[str, tuple[bool, float, float]] = {}

    worst = 0.0
    for _ in range(n_tests):
        v = _random_test_function(grid, rng)
        norm_v = ws.norm(v)
        if norm_v == 0.0:
            continue
        worst = max(worst, abs(float(v @ g)) / (norm_u * norm_v))
    checks["weak_form"] = (worst <= tol, worst, tol)

    nehari = abs(float(u @ g)) / norm_u**2
    checks["nehari"] = (nehari <= tol, nehari, tol)

    u_neg = np.minimum(u, 0.0)
    neg_norm = ws.norm(u_neg)
    checks["negative_part"] = (neg_norm <= 1e-8 * norm_u, neg_norm / norm_u, 1e-8)

    f_term = float(np.sum(ws.w * spec.f(u) * u_neg))
    pairing = float(u_neg @ (ws.B @ u))
    identity_gap = abs(pairing - neg_norm**2) / norm_u**2
    checks["negative_identity"] = (
        f_term == 0.0 and identity_gap <= 1e-8,
        identity_gap,
        1e-8,
    )

    energy_gap = abs(ws.energy(u) - record.level) / max(abs(record.level), 1e-300)
    checks["energy_recompute"] = (energy_gap <= 1e-10, energy_gap, 1e-10)

    # test bump placed in the interior corner region carrying the least
    # solution mass (solutions may hug any wall of the computational box)
    s_lo, s_hi = grid.s_span
    t_lo, t_hi = grid.t_span
    width = 0.06 * max(s_hi - s_lo, t_hi - t_lo)
    corners = [
        (s_lo + 0.15 * (s_hi - s_lo), t_lo + 0.15 * (t_hi - t_lo)),
        (s_lo + 0.15 * (s_hi - s_lo), t_hi - 0.15 * (t_hi - t_lo)),
        (s_hi - 0.15 * (s_hi - s_lo), t_lo + 0.15 * (t_hi - t_lo)),
        (s_hi - 0.15 * (s_hi - s_lo), t_hi - 0.15 * (t_hi - t_lo)),
    ]
    u2 = np.abs(u.reshape(grid.shape))
    best_far: np.ndarray | None = None
    best_mass = math.inf
    for cs, ct in corners:
        bump = np.exp(
            -(((grid.s[:, None] - cs) ** 2 + (grid.t[None, :] - ct) ** 2) / width**2)
        )
        mass = float(np.sum(bump * u2))
        if mass < best_mass:
            best_mass = mass
            best_far = bump.ravel()
    assert best_far is not None
    norm_far = ws.norm(best_far)
    locality = abs(float(best_far @ g)) / (norm_u * norm_far) if norm_far > 0 else 0.0
    checks["locality"] = (locality <= tol, locality, tol)

    return {
        "passed": all(ok for ok, _, _ in checks.values()),
        "checks": checks,
        "failed": [name for name, (ok, _, _) in checks.items() if not ok],
        "n_tests": n_tests,
    }


# --------------------------------------------------------------------------
# Separation sweep
# --------------------------------------------------------------------------

def _well_window(
    N: int, K: int, rho: float, w: float, margin: float = 18.0
) -> tuple[float, float, float, float]:
    """Axis-hugging window (s_min, s_max, t_min, t_max) around radius rho.

    Concentration on the smaller symmetry orbit costs the least energy, so
    the window tracks the s-axis when the S^(K-1) orbit is at most as large
    as S^(N-K-1), and the t-axis otherwise; the transverse span keeps the
    axis itself inside (its natural no-flux boundary at 0)."""
    lo = max(0.0, rho - margin * w)
    hi = rho + margin * w
    if K - 1 <= N - K - 1:
        return lo, hi, 0.0, 2.0 * margin * w
    return 0.0, 2.0 * margin * w, lo, hi


def _locate_well(
    spec: NonlinearitySpec, N: int, K: int, alpha: float, A: float
) -> tuple[float, float]:
    """Locate the orbit radius whose single-bump fibering level is lowest.

    Scans rho around the natural scale A^(1/alpha) (where the potential
    amplitude crosses 1) with an axis bump of the local soliton width
    1/sqrt(1 + A rho^-alpha) on a small window grid, then golden-refines
    the argmin on the log axis.  Returns (rho_best, width_best)."""
    rho_guess = A ** (1.0 / alpha)

    def width(rho: float) -> float:
        return 1.0 / math.sqrt(1.0 + A * rho ** (-alpha))

    def level(rho: float) -> float:
        w = width(rho)
        s_lo, s_hi, t_lo, t_hi = _well_window(N, K, rho, w, margin=20.0)
        cs = rho if K - 1 <= N - K - 1 else 0.0
        ct = 0.0 if K - 1 <= N - K - 1 else rho
        try:
            grid = biradial_grid(
                N=N, K=K, s_max=s_hi, t_max=t_hi, n_s=48, n_t=48,
                s_min=s_lo, t_min=t_lo,
            )
            bump = np.exp(
                -(((grid.s[:, None] - cs) ** 2 + (grid.t[None, :] - ct) ** 2) / w**2)
            )
            return fibering_max(BiradialProfile(grid, bump), spec, A, alpha).max_value
        except (RuntimeError, ValueError, FloatingPointError):
            return math.inf

    cands = np.geomspace(rho_guess / 8.0, rho_guess * 8.0, 17)
    vals = [level(float(r)) for r in cands]
    k = int(np.argmin(vals))
    if not math.isfinite(vals[k]):
        raise RuntimeError(
            f"could not evaluate any candidate well radius near {rho_guess}"
        )
    a = math.log(cands[max(k - 1, 0)])
    b = math.log(cands[min(k + 1, len(cands) - 1)])
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c1 = b - invphi * (b - a)
    d1 = a + invphi * (b - a)
    fc, fd = level(math.exp(c1)), level(math.exp(d1))
    for _ in range(12):
        if fc <= fd:
            b, d1, fd = d1, c1, fc
            c1 = b - invphi * (b - a)
            fc = level(math.exp(c1))
        else:
            a, c1, fc = c1, d1, fd
            d1 = a + invphi * (b - a)
            fd = level(math.exp(d1))
    rho_best = math.exp(0.5 * (a + b))
    return rho_best, width(rho_best)


@dataclass(frozen=True)
class SeparationRow:
    A: float
    c_estimate: float
    c_bound: float
    m_lower: float
    m_upper: float
    separated: bool
    converged: bool
    nonradiality: float
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class SeparationTable:
    rows: tuple[SeparationRow, ...]
    crossover_A: float
    K: int
    N: int
    alpha: float


def solve_well_scaled(
    params: ProblemParams,
    spec: NonlinearitySpec,
    grid_shape: tuple[int, int] = (128, 128),
    tol: float = 1e-6,
    max_iter: int = 10_000,
    n_starts: int = 2,
    seed: int = 0,
) -> tuple[SolutionRecord, dict]:
    """Mountain-pass solve on a window scaled to the natural well radius.

    Locates the energetically best orbit radius ``rho`` (a 1-D fibering
    scan refined by golden search), windows the computational box around
    the smaller symmetry-orbit axis so the soliton width stays resolved at
    every coupling strength, builds a negative-energy endpoint inside the
    window, and runs :func:`mpa_solve` there.  Returns the record plus a
    well descriptor ``{"rho", "width", "window"}``.  This is the per-point
    engine of :func:`separation_check`.
    """
    N, K, alpha, A = params.N, params.K, params.alpha, params.A
    rho_best, w_best = _locate_well(spec, N, K, alpha, A)
    window = _well_window(N, K, rho_best, w_best)
    s_lo, s_hi, t_lo, t_hi = window
    grid = biradial_grid(
        N=N, K=K, s_max=s_hi, t_max=t_hi,
        n_s=grid_shape[0], n_t=grid_shape[1],
        s_min=s_lo, t_min=t_lo,
    )
    if K - 1 <= N - K - 1:
        center = (rho_best, min(2.0 * w_best, 0.5 * (t_hi - t_lo)))
    else:
        center = (min(2.0 * w_best, 0.5 * (s_hi - s_lo)), rho_best)
    ubar = negative_energy_endpoint(
        grid, spec, A, alpha, center=center, width=2.0 * w_best
    )
    record = mpa_solve(
        ubar, spec, params, tol=tol, max_iter=max_iter,
        n_starts=n_starts, seed=seed,
    )
    well = {"rho": rho_best, "width": w_best, "window": window}
    return record, well


def separation_check(
    params: ProblemParams,
    spec: NonlinearitySpec,
    A_list,
    bump: BumpSpec | None = None,
    grid_shape: tuple[int, int] = (128, 128),
    tol: float = 1e-6,
    max_iter: int = 10_000,
    seed: int = 0,
    trial_grid: "object | None" = None,
) -> SeparationTable:
    """Sweep ``A`` and tabulate the nonradial level against the radial floor.

    Per A: ``c_estimate`` from :func:`mpa_solve` started from a
    negative-energy endpoint on a box scaled to the natural well radius,
    ``c_bound`` from the explicit path upper bound, ``m_lower``
    the certified radial floor ``C0 A^m_exp``, ``m_upper`` the trial-family
    estimate, and ``separated = (c_estimate < m_lower)`` -- strict
    inequality against the *certified* floor.  Non-converged solves are kept
    in the table but flagged and never count as separated.  The crossover
    ``A*`` solves ``c_bound(A) = m_lower(A)`` between the two explicit
    curves (it exists because the growth exponents differ for admissible K).
    """
    A_values = [float(a) for a in A_list]
    if len(A_values) < 1 or any(b <= a for a, b in zip(A_values, A_values[1:])):
        raise ValueError("A_list must be strictly increasing and nonempty")
    N, K, alpha = params.N, params.K, params.alpha
    p1, p2 = params.p1, params.p2
    if bump is None:
        bump = BumpSpec()
    _, _, _, c0, m_exp = chain_constants(N, alpha, p1, p2, spec.M2, A_values[0])
    _, c_exp, gap = level_exponents(N, alpha, p1, p2, K)
    if gap <= 0.0:
        raise ValueError(
            f"K={K} has no positive level gap (gap={gap}); separation cannot occur"
        )

    rows: list[SeparationRow] = []
    for A in A_values:
        flags: list[str] = []
        m_lower = c0 * A**m_exp
        try:
            _, c_bound = path_upper_bound(bump, spec, N, K, alpha, A)
        except ValueError as exc:
            rows.append(
                SeparationRow(
                    A=A, c_estimate=math.nan, c_bound=math.nan, m_lower=m_lower,
                    m_upper=math.nan, separated=False, converged=False,
                    nonradiality=0.0, flags=("below-threshold: " + str(exc),),
                )
            )
            continue
        run_params = ProblemParams(N=N, alpha=alpha, A=A, K=K, p1=p1, p2=p2)
        try:
            record, well = solve_well_scaled(
                run_params, spec, grid_shape=grid_shape, tol=tol,
                max_iter=max_iter, seed=seed,
            )
        except (ValueError, FloatingPointError, RuntimeError) as exc:
            rows.append(
                SeparationRow(
                    A=A, c_estimate=math.nan, c_bound=c_bound, m_lower=m_lower,
                    m_upper=math.nan, separated=False, converged=False,
                    nonradiality=0.0, flags=("solve-failed: " + str(exc),),
                )
            )
            continue
        if trial_grid is None:
            g = record.u_K.grid
            rho_hi = math.hypot(g.s_span[1], g.t_span[1])
            rad_grid = radial_grid(N, r_max=max(rho_hi, 3.0 * well["rho"]), n=1024)
        else:
            rad_grid = trial_grid
        m_upper, _ = estimate_mA(default_trial_family(rad_grid), spec, A, alpha)
        flags.extend(record.flags)
        separated = bool(record.converged and record.level < m_lower)
        rows.append(
            SeparationRow(
                A=A,
                c_estimate=record.level,
                c_bound=c_bound,
                m_lower=m_lower,
                m_upper=m_upper,
                separated=separated,
                converged=record.converged,
                nonradiality=record.nonradiality,
                flags=tuple(flags),
            )
        )

    crossover = _crossover_A(bump, spec, N, K, alpha, c0, m_exp, A_values)
    return SeparationTable(
        rows=tuple(rows), crossover_A=crossover, K=K, N=N, alpha=alpha
    )


def _crossover_A(bump, spec, N, K, alpha, c0, m_exp, A_values) -> float:
    """Solve c_bound(A) = m_lower(A) for the explicit curves via brentq on
    the log-difference.  Returns nan when no crossing is bracketed."""

    def log_diff(log_a: float) -> float:
        A = math.exp(log_a)
        try:
            _, bound = path_upper_bound(bump, spec, N, K, alpha, A)
        except ValueError:
            return math.inf  # below threshold: treat as c_bound above floor
        return math.log(bound) - math.log(c0 * A**m_exp)

    lo = math.log(A_values[0])
    hi = math.log(A_values[-1] * 1e3)
    f_lo = log_diff(lo)
    # walk the bracket outward until the sign changes (bounded effort)
    for _ in range(60):
        if math.isfinite(f_lo) and f_lo < 0.0:
            # already separated at the low end; walk down for the crossing
            lo_lo = lo - 2.0
            f_lo_lo = log_diff(lo_lo)
            if not math.isfinite(f_lo_lo) or f_lo_lo > 0.0:
                if math.isfinite(f_lo_lo):
                    return math.exp(brentq(log_diff, lo_lo, lo, xtol=1e-10))
                return math.exp(lo)  # threshold itself acts as the crossover
            lo = lo_lo
            f_lo = f_lo_lo
            continue
        break
    f_hi = log_diff(hi)
    for _ in range(60):
        if f_hi > 0.0:
            hi += 2.0
            f_hi = log_diff(hi)
            continue
        break
    if not (math.isfinite(f_lo) and math.isfinite(f_hi)) or f_lo * f_hi > 0.0:
        return math.nan
    return math.exp(brentq(log_diff, lo, hi, xtol=1e-10))


# --------------------------------------------------------------------------
# Cross-grid distance
# --------------------------------------------------------------------------

def profile_distance(
    p1: BiradialProfile,
    p2: BiradialProfile,
    A: float,
    alpha: float,
) -> float:
    """|p1 - Pi p2|_A on p1's grid, where Pi matches grids by bilinear
    interpolation in (s, t) (zero outside p2's box)."""
    g1, g2 = p1.grid, p2.grid
    if g1.N != g2.N:
        raise ValueError(f"dimension mismatch: N={g1.N} vs N={g2.N}")
    if g1 is g2 or (
        g1.shape == g2.shape
        and g1.s_span == g2.s_span
        and g1.t_span == g2.t_span
        and np.array_equal(g1.s, g2.s)
    ):
        diff = BiradialProfile(g1, p1.values - p2.values)
        return math.sqrt(norm_A(diff, A, alpha)[2])
    interp = RegularGridInterpolator(
        (g2.s, g2.t), p2.values, bounds_error=False, fill_value=0.0
    )
    pts = np.stack(
        [np.repeat(g1.s, g1.shape[1]), np.tile(g1.t, g1.shape[0])], axis=1
    )
    mapped = interp(pts).reshape(g1.shape)
    diff = BiradialProfile(g1, p1.values - mapped)
    return math.sqrt(norm_A(diff, A, alpha)[2])
