"""Experiment harness: configuration, sweeps, slope fits, report emission.

Subcommands
-----------
``classify``
    Region verdict for one exponent point ``(N, alpha, p)``.
``nu``
    Multiplicity count and the admissible symmetry indices for
    ``(N, alpha, p1, p2)``.
``exponents``
    Critical-exponent thresholds plus per-K level exponents and gaps.
``check-nonlinearity``
    Structural assumption report for the selected built-in family.
``identities``
    Reduced vs direct integral agreement over ``epsilon_list``.
``ratio``
    Energy-ratio sweep over ``A_list``, the threshold ``A0`` where the
    ratio crosses 1, and the large-A linearity of ``ratio/A``.
``m-bounds``
    Certified radial floor ``C0 A^m_exp`` vs the trial-family estimate
    over ``A_list``; the floor's log-log slope is checked exactly.
``c-bounds``
    Explicit path upper bound over ``A_list`` with a slope fit against
    the predicted growth exponent.
``solve``
    One symmetry-reduced mountain-pass solve with weak-form verification;
    writes the profile in columnar form.
``separate``
    Separation table over ``A_list`` for the configured ``K``: levels,
    certified floor, crossover of the explicit curves.
``theorem-demo``
    Full pipeline: multiplicity count, per-K separation sweeps, per-K
    solves at the largest A, pairwise distinctness, and a text summary.

Every run writes ``<out>/<subcommand>.json`` (the full report with the
exact config embedded); subcommands with tabular rows also write
``<out>/<subcommand>.csv`` whose first line embeds the config as a
comment.  Identical config and seed produce bit-identical outputs.

Config file format: a single JSON object whose keys are exactly the
fields of :class:`ExperimentConfig`.  Every key can also be set on the
command line with ``--set key=value`` (comma-separated values for list
fields); the dedicated flags ``--out``, ``--seed``, ``--threads``
override both.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import platform
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from singwell import __version__
from singwell.biradial_solver import (
    mountain_pass_floor,
    mpa_solve,
    negative_energy_endpoint,
    profile_distance,
    separation_check,
    solve_well_scaled,
    verify_solution,
)
from singwell.discretization import (
    BiradialProfile,
    RadialProfile,
    biradial_grid,
    radial_grid,
)
from singwell.exponents import (
    ProblemParams,
    classify_region,
    critical_exponents,
    level_exponents,
    nu_and_admissible_K,
)
from singwell.nonlinearity import check_assumptions, find_mu, make_builtin
from singwell.radial_solver import chain_constants, default_trial_family, estimate_mA
from singwell.testfunction import (
    BumpSpec,
    direct_integrals,
    energy_ratio,
    limit_integrals,
    path_upper_bound,
    polar_direct_integrals,
    reduced_integrals,
)

SUBCOMMANDS = (
    "classify",
    "nu",
    "exponents",
    "check-nonlinearity",
    "identities",
    "ratio",
    "m-bounds",
    "c-bounds",
    "solve",
    "separate",
    "theorem-demo",
)

_INT_FIELDS = {
    "N", "K", "n_r", "n_s", "n_t", "n_nodes",
    "max_iter", "n_starts", "n_tests", "seed", "threads",
}
_FLOAT_FIELDS = {
    "alpha", "A", "p1", "p2", "r_max", "s_max", "t_max", "tol",
    "bump_amplitude",
}
_OPT_FLOAT_FIELDS = {"p"}
_STR_FIELDS = {"nonlinearity", "bump_kind", "out_dir"}
_TUPLE_FIELDS = {"A_list", "epsilon_list"}


@dataclass(frozen=True)
class ExperimentConfig:
    """All knobs of one experiment, serializable and round-trippable.

    Problem fields: ``N`` (dimension), ``K`` (symmetry index), ``alpha``
    (potential exponent), ``A`` (coupling), ``p1 < p2`` (growth exponents),
    ``p`` (single exponent for ``classify``; defaults to ``p2`` when unset),
    ``nonlinearity`` (built-in family name), ``bump_kind``/``bump_amplitude``
    (test-function family).  Sweep fields: ``A_list`` (strictly increasing;
    empty picks a per-subcommand default) and ``epsilon_list`` (entries in
    (0, 1]).  Grid fields: ``n_r``/``r_max`` for radial trials,
    ``n_s``/``n_t``/``s_max``/``t_max`` for the symmetry-reduced box,
    ``n_nodes`` for closed-form quadrature.  Solver fields: ``tol``,
    ``max_iter``, ``n_starts``, ``n_tests``.  Harness fields: ``out_dir``,
    ``seed``, ``threads``.
    """

    N: int = 4
    K: int = 2
    alpha: float = 1.0
    A: float = 100.0
    p1: float = 2.5
    p2: float = 5.0
    p: float | None = None
    nonlinearity: str = "MinPower"
    bump_kind: str = "tensor"
    bump_amplitude: float = 1.0
    A_list: tuple[float, ...] = ()
    epsilon_list: tuple[float, ...] = (1.0, 0.5, 0.25, 0.1)
    n_r: int = 512
    r_max: float = 30.0
    n_s: int = 128
    n_t: int = 128
    s_max: float = 10.0
    t_max: float = 10.0
    n_nodes: int = 64
    tol: float = 1e-6
    max_iter: int = 4000
    n_starts: int = 2
    n_tests: int = 20
    out_dir: str = "out"
    seed: int = 0
    threads: int = 1

    def validate(self) -> None:
        """Field-level checks; module preconditions are enforced by the
        module constructors before any heavy computation starts."""
        if not (isinstance(self.N, int) and self.N >= 3):
            raise ValueError(f"N must be an integer >= 3, got {self.N}")
        if not (isinstance(self.K, int) and 1 <= self.K <= self.N - 1):
            raise ValueError(f"K must be an integer in [1, N-1], got {self.K}")
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not (math.isfinite(self.A) and self.A > 0.0):
            raise ValueError(f"A must be positive, got {self.A}")
        if not 2.0 < self.p1 < self.p2:
            raise ValueError(f"need 2 < p1 < p2, got p1={self.p1}, p2={self.p2}")
        if self.p is not None and not (math.isfinite(self.p) and self.p > 0.0):
            raise ValueError(f"p must be positive when set, got {self.p}")
        if not self.nonlinearity:
            raise ValueError("nonlinearity must name a built-in family")
        BumpSpec(kind=self.bump_kind, amplitude=self.bump_amplitude)
        if self.A_list:
            arr = np.asarray(self.A_list, dtype=float)
            if np.any(arr <= 0.0) or np.any(np.diff(arr) <= 0.0):
                raise ValueError("A_list must be positive and strictly increasing")
        if not self.epsilon_list:
            raise ValueError("epsilon_list must be nonempty")
        for e in self.epsilon_list:
            if not 0.0 < e <= 1.0:
                raise ValueError(f"epsilon_list entries must lie in (0, 1], got {e}")
        for name in ("n_r", "n_s", "n_t"):
            if getattr(self, name) < 8:
                raise ValueError(f"{name} must be at least 8")
        if self.n_nodes < 16:
            raise ValueError(f"n_nodes must be at least 16, got {self.n_nodes}")
        for name in ("r_max", "s_max", "t_max"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if not self.tol > 0.0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        for name in ("max_iter", "n_starts", "n_tests", "threads"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must fit in an unsigned 64-bit word, got {self.seed}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["A_list"] = list(self.A_list)
        d["epsilon_list"] = list(self.epsilon_list)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs: dict = {}
        for key, value in data.items():
            if key in _TUPLE_FIELDS:
                kwargs[key] = tuple(float(v) for v in value)
            elif key in _INT_FIELDS:
                if isinstance(value, float) and not value.is_integer():
                    raise ValueError(f"{key} must be an integer, got {value}")
                kwargs[key] = int(value)
            elif key in _FLOAT_FIELDS:
                kwargs[key] = float(value)
            elif key in _OPT_FLOAT_FIELDS:
                kwargs[key] = None if value is None else float(value)
            else:
                kwargs[key] = str(value)
        return cls(**kwargs)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))

    def with_overrides(self, pairs) -> "ExperimentConfig":
        """Apply ``key=value`` strings (the ``--set`` mirror of the schema)."""
        updates: dict = {}
        for pair in pairs:
            key, sep, text = pair.partition("=")
            if not sep:
                raise ValueError(f"--set expects key=value, got {pair!r}")
            key = key.strip()
            text = text.strip()
            if key in _TUPLE_FIELDS:
                updates[key] = tuple(
                    float(tok) for tok in text.split(",") if tok.strip()
                )
            elif key in _INT_FIELDS:
                updates[key] = int(text)
            elif key in _FLOAT_FIELDS:
                updates[key] = float(text)
            elif key in _OPT_FLOAT_FIELDS:
                updates[key] = None if text.lower() in ("none", "") else float(text)
            elif key in _STR_FIELDS:
                updates[key] = text
            else:
                raise ValueError(f"unknown config key {key!r}")
        return replace(self, **updates)


@dataclass
class SweepReport:
    """Self-describing result of one subcommand run."""

    subcommand: str
    config: dict
    rows: list
    slopes: dict = field(default_factory=dict)
    passed: bool = True
    notes: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    version: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "config": self.config,
            "rows": _jsonable(self.rows),
            "slopes": _jsonable(self.slopes),
            "passed": bool(self.passed),
            "notes": list(self.notes),
            "extra": _jsonable(self.extra),
            "version": self.version,
        }


def fit_slope(series) -> tuple[float, float]:
    """Least-squares slope of ``log(value)`` against ``log(A)``.

    ``series`` is an iterable of ``(A, value)`` pairs, at least 4 of them,
    with positive entries on both sides.  Returns ``(slope, stderr)`` with
    the standard error computed from the fit residuals.
    """
    pts = [(float(a), float(v)) for a, v in series]
    if len(pts) < 4:
        raise ValueError(f"slope fit needs at least 4 points, got {len(pts)}")
    if any(a <= 0.0 or v <= 0.0 for a, v in pts):
        raise ValueError("slope fit needs positive A and positive values")
    x = np.log(np.array([a for a, _ in pts]))
    y = np.log(np.array([v for _, v in pts]))
    xbar = float(x.mean())
    sxx = float(np.sum((x - xbar) ** 2))
    if sxx == 0.0:
        raise ValueError("slope fit needs at least two distinct A values")
    slope = float(np.sum((x - xbar) * (y - y.mean())) / sxx)
    intercept = float(y.mean()) - slope * xbar
    resid = y - (intercept + slope * x)
    dof = len(pts) - 2
    stderr = math.sqrt(float(np.sum(resid**2)) / dof / sxx)
    return slope, stderr


# --------------------------------------------------------------------------
# Emission helpers
# --------------------------------------------------------------------------

def _jsonable(obj):
    """Recursively convert to JSON-writable values (NaN/inf -> None)."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def _version_stamp() -> dict:
    import scipy

    return {
        "package": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


def _csv_cell(value):
    if isinstance(value, (list, tuple)):
        return ";".join(str(v) for v in value)
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return value


def _write_outputs(report: SweepReport, out_dir: Path) -> list[str]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[str] = []
    json_path = out_dir / f"{report.subcommand}.json"
    json_path.write_text(
        json.dumps(report.as_dict(), sort_keys=True, indent=2) + "\n"
    )
    written.append(str(json_path))
    if report.rows:
        csv_path = out_dir / f"{report.subcommand}.csv"
        header: list[str] = []
        for row in report.rows:
            for key in row:
                if key not in header:
                    header.append(key)
        with csv_path.open("w", newline="") as handle:
            handle.write(
                "# config " + json.dumps(report.config, sort_keys=True) + "\n"
            )
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in report.rows:
                writer.writerow([_csv_cell(row.get(key, "")) for key in header])
        written.append(str(csv_path))
    return written


def _write_profile(profile, path: Path) -> None:
    """Columnar text serialization: grid descriptor lines, then node rows."""
    grid = profile.grid
    with path.open("w") as handle:
        if isinstance(profile, BiradialProfile):
            handle.write("# columnar profile\n# kind biradial\n")
            handle.write(f"# N {grid.N}\n# K {grid.K}\n")
            s_lo, s_hi = grid.s_span
            t_lo, t_hi = grid.t_span
            handle.write(f"# s_span {s_lo!r} {s_hi!r}\n")
            handle.write(f"# t_span {t_lo!r} {t_hi!r}\n")
            handle.write(f"# shape {grid.shape[0]} {grid.shape[1]}\n")
            handle.write("# columns: s t value\n")
            vals = profile.values
            for i, s in enumerate(grid.s):
                for j, t in enumerate(grid.t):
                    handle.write(f"{s!r} {t!r} {vals[i, j]!r}\n")
        elif isinstance(profile, RadialProfile):
            handle.write("# columnar profile\n# kind radial\n")
            handle.write(f"# N {grid.N}\n")
            handle.write(f"# r_max {grid.r_max!r}\n# n {grid.r.size}\n")
            handle.write("# columns: r value\n")
            for r, v in zip(grid.r, profile.values):
                handle.write(f"{r!r} {v!r}\n")
        else:
            raise TypeError(f"cannot serialize profile of type {type(profile)!r}")


def _map_points(fn, items, threads: int) -> list:
    """Order-preserving map, threaded when asked; the caller is the single
    collector, so files are only written from the main thread."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _spec_of(cfg: ExperimentConfig):
    return make_builtin(cfg.nonlinearity, cfg.p1, cfg.p2)


def _bump_of(cfg: ExperimentConfig) -> BumpSpec:
    return BumpSpec(kind=cfg.bump_kind, amplitude=cfg.bump_amplitude)


def _a_list(cfg: ExperimentConfig, default) -> list[float]:
    return [float(a) for a in (cfg.A_list if cfg.A_list else default)]


# --------------------------------------------------------------------------
# Subcommand handlers
# --------------------------------------------------------------------------

def _run_classify(cfg: ExperimentConfig) -> SweepReport:
    p = cfg.p if cfg.p is not None else cfg.p2
    verdict = classify_region(cfg.N, cfg.alpha, p)
    row = {
        "N": cfg.N,
        "alpha": cfg.alpha,
        "p": p,
        "status": verdict.status.value,
        "rule": verdict.rule,
    }
    return SweepReport(
        subcommand="classify",
        config=cfg.to_dict(),
        rows=[row],
        notes=[f"(N={cfg.N}, alpha={cfg.alpha:g}, p={p:g}) -> {verdict.status.value}"],
    )


def _run_nu(cfg: ExperimentConfig) -> SweepReport:
    nu, ks = nu_and_admissible_K(cfg.N, cfg.alpha, cfg.p1, cfg.p2)
    row = {
        "N": cfg.N,
        "alpha": cfg.alpha,
        "p1": cfg.p1,
        "p2": cfg.p2,
        "nu": nu,
        "admissible_K": list(ks),
    }
    k_text = ",".join(str(k) for k in ks) if ks else "-"
    return SweepReport(
        subcommand="nu",
        config=cfg.to_dict(),
        rows=[row],
        notes=[f"nu={nu} K in {{{k_text}}}"],
    )


def _run_exponents(cfg: ExperimentConfig) -> SweepReport:
    table = critical_exponents(cfg.N, cfg.alpha)
    rows: list[dict] = [
        {
            "kind": "thresholds",
            "N": cfg.N,
            "alpha": cfg.alpha,
            "two_star": table.two_star,
            "two_star_alpha": table.two_star_alpha,
            "two_alpha": table.two_alpha,
            "p1_star": table.p1_star,
            "p2_star": table.p2_star,
        }
    ]
    notes: list[str] = []
    try:
        nu, ks = nu_and_admissible_K(cfg.N, cfg.alpha, cfg.p1, cfg.p2)
        notes.append(f"nu={nu}")
        for k in ks:
            m_exp, c_exp, gap = level_exponents(cfg.N, cfg.alpha, cfg.p1, cfg.p2, k)
            rows.append(
                {"kind": "level", "K": k, "m_exp": m_exp, "c_exp": c_exp, "gap": gap}
            )
    except ValueError as exc:
        notes.append(f"level exponents unavailable: {exc}")
    return SweepReport(
        subcommand="exponents", config=cfg.to_dict(), rows=rows, notes=notes
    )


def _run_check_nonlinearity(cfg: ExperimentConfig) -> SweepReport:
    spec = _spec_of(cfg)
    report = check_assumptions(spec)
    rows = [
        {
            "name": c.name,
            "passed": c.passed,
            "worst_margin": c.worst_margin,
            "description": c.description,
        }
        for c in report.checks
    ]
    extra = {"report": report.as_dict()}
    notes = [f"family={spec.family} passed={report.passed}"]
    try:
        extra["mu_smallest_passing"] = find_mu(spec)
    except ValueError as exc:
        notes.append(f"find_mu: {exc}")
    return SweepReport(
        subcommand="check-nonlinearity",
        config=cfg.to_dict(),
        rows=rows,
        passed=report.passed,
        notes=notes,
        extra=extra,
    )


_IDENTITY_TOL = 1e-6


def _run_identities(cfg: ExperimentConfig) -> SweepReport:
    spec = _spec_of(cfg)
    bump = _bump_of(cfg)

    def point(eps: float) -> dict:
        try:
            red = reduced_integrals(
                bump, spec, cfg.N, cfg.K, cfg.alpha, eps, n_nodes=cfg.n_nodes
            )
            pol = polar_direct_integrals(
                bump, spec, cfg.N, cfg.K, cfg.alpha, eps, n_nodes=cfg.n_nodes
            )
            direct = direct_integrals(bump, spec, cfg.N, cfg.K, cfg.alpha, eps)
        except (ValueError, FloatingPointError) as exc:
            return {"epsilon": eps, "error": str(exc)}
        names = ("pot", "mass_F", "grad")
        row: dict = {"epsilon": eps}
        worst = 0.0
        for name, a, b, c in zip(names, red, pol, direct):
            rel_polar = abs(a - b) / max(abs(a), abs(b))
            rel_direct = abs(a - c) / max(abs(a), abs(c))
            row[f"{name}_reduced"] = a
            row[f"{name}_polar"] = b
            row[f"{name}_direct"] = c
            row[f"{name}_rel_err"] = max(rel_polar, rel_direct)
            worst = max(worst, rel_polar, rel_direct)
        row["rel_err_max"] = worst
        row["passed"] = worst <= _IDENTITY_TOL
        return row

    rows = _map_points(point, cfg.epsilon_list, cfg.threads)
    passed = all(row.get("passed", False) for row in rows)
    worst = max(
        (row["rel_err_max"] for row in rows if "rel_err_max" in row), default=math.inf
    )
    return SweepReport(
        subcommand="identities",
        config=cfg.to_dict(),
        rows=rows,
        passed=passed,
        notes=[f"worst relative error {worst:.3e} (tolerance {_IDENTITY_TOL:g})"],
    )


def _run_ratio(cfg: ExperimentConfig) -> SweepReport:
    spec = _spec_of(cfg)
    bump = _bump_of(cfg)
    a_values = _a_list(cfg, np.geomspace(1.5, 1e8, 27))

    def point(a: float) -> dict:
        try:
            ratio = energy_ratio(
                bump, spec, cfg.N, cfg.K, cfg.alpha, a, n_nodes=cfg.n_nodes
            )
        except (ValueError, FloatingPointError, RuntimeError) as exc:
            return {"A": a, "error": str(exc)}
        return {"A": a, "ratio": ratio, "ratio_over_A": ratio / a}

    rows = _map_points(point, a_values, cfg.threads)
    good = [row for row in rows if "ratio" in row]
    above = [row["A"] for row in good if row["ratio"] > 1.0]
    a0 = min(above) if above else None
    limits = limit_integrals(bump, spec, cfg.N, cfg.K, n_nodes=cfg.n_nodes)
    extra: dict = {"A0": a0, "ratio_over_A_limit": limits["ratio_over_A_limit"]}
    notes = []
    tail = [row["ratio_over_A"] for row in good if row["A"] >= 1e6]
    if len(tail) >= 2:
        variation = (max(tail) - min(tail)) / min(tail)
        extra["tail_variation"] = variation
        notes.append(f"ratio/A varies {variation:.3%} over A >= 1e6")
    slopes = {}
    fit_rows = [(row["A"], row["ratio"]) for row in good if row["A"] >= 1e4]
    if len(fit_rows) >= 4:
        slope, err = fit_slope(fit_rows)
        slopes["ratio"] = {"slope": slope, "stderr": err}
    passed = a0 is not None and len(good) == len(rows)
    if a0 is not None:
        notes.insert(0, f"ratio crosses 1 at A0 = {a0:g}")
    else:
        notes.insert(0, "ratio never crossed 1; extend A_list upward")
    return SweepReport(
        subcommand="ratio",
        config=cfg.to_dict(),
        rows=rows,
        slopes=slopes,
        passed=passed,
        notes=notes,
        extra=extra,
    )


def _run_m_bounds(cfg: ExperimentConfig) -> SweepReport:
    spec = _spec_of(cfg)
    a_values = _a_list(cfg, np.geomspace(1.0, 1e4, 5))
    _, _, _, c0, m_exp = chain_constants(
        cfg.N, cfg.alpha, cfg.p1, cfg.p2, spec.M2, a_values[0]
    )
    grid = radial_grid(cfg.N, r_max=cfg.r_max, n=cfg.n_r)
    family = default_trial_family(grid)

    def point(a: float) -> dict:
        m_lower = c0 * a**m_exp
        try:
            m_upper, desc = estimate_mA(family, spec, a, cfg.alpha)
        except (ValueError, FloatingPointError, RuntimeError) as exc:
            return {"A": a, "m_lower": m_lower, "error": str(exc)}
        return {
            "A": a,
            "m_lower": m_lower,
            "m_upper": m_upper,
            "margin": m_upper - m_lower,
            "trial_index": desc["index"],
        }

    rows = _map_points(point, a_values, cfg.threads)
    good = [row for row in rows if "m_upper" in row]
    slope, err = fit_slope([(row["A"], row["m_lower"]) for row in rows])
    slopes = {"m_lower": {"slope": slope, "stderr": err}}
    floor_ok = all(row["m_upper"] >= row["m_lower"] * (1.0 - 1e-9) for row in good)
    slope_ok = abs(slope - m_exp) <= 1e-8
    passed = floor_ok and slope_ok and len(good) == len(rows)
    return SweepReport(
        subcommand="m-bounds",
        config=cfg.to_dict(),
        rows=rows,
        slopes=slopes,
        passed=passed,
        notes=[
            f"certified floor C0*A^m_exp with C0={c0:.6g}, m_exp={m_exp:.12g}",
            f"fitted slope {slope:.12g} (exact power law; stderr {err:.2e})",
        ],
        extra={"C0": c0, "m_exp": m_exp},
    )


def _run_c_bounds(cfg: ExperimentConfig) -> SweepReport:
    spec = _spec_of(cfg)
    bump = _bump_of(cfg)
    a_values = _a_list(cfg, np.geomspace(1e2, 1e6, 5))
    _, c_exp, _ = level_exponents(cfg.N, cfg.alpha, cfg.p1, cfg.p2, cfg.K)

    def point(a: float) -> dict:
        try:
            _, bound = path_upper_bound(
                bump, spec, cfg.N, cfg.K, cfg.alpha, a, n_nodes=cfg.n_nodes
            )
        except (ValueError, FloatingPointError, RuntimeError) as exc:
            return {"A": a, "error": str(exc)}
        return {"A": a, "c_bound": bound}

    rows = _map_points(point, a_values, cfg.threads)
    good = [(row["A"], row["c_bound"]) for row in rows if "c_bound" in row]
    slopes = {}
    passed = len(good) == len(rows)
    notes = [f"predicted growth exponent c_exp = {c_exp:g}"]
    if len(good) >= 4:
        slope, err = fit_slope(good)
        slopes["c_bound"] = {"slope": slope, "stderr": err}
        passed = passed and abs(slope - c_exp) <= 0.05
        notes.append(f"fitted slope {slope:.6g} (stderr {err:.2e})")
    else:
        passed = False
        notes.append("fewer than 4 usable points; no slope fit")
    return SweepReport(
        subcommand="c-bounds",
        config=cfg.to_dict(),
        rows=rows,
        slopes=slopes,
        passed=passed,
        notes=notes,
        extra={"c_exp": c_exp},
    )


def _record_row(record, a: float, k: int) -> dict:
    return {
        "A": a,
        "K": k,
        "level": record.level,
        "residual": record.residual,
        "nonradiality": record.nonradiality,
        "converged": record.converged,
        "iterations": record.iterations,
        "flags": list(record.flags),
    }


def _run_solve(cfg: ExperimentConfig) -> SweepReport:
    spec = _spec_of(cfg)
    params = ProblemParams(
        N=cfg.N, alpha=cfg.alpha, A=cfg.A, K=cfg.K, p1=cfg.p1, p2=cfg.p2
    )
    grid = biradial_grid(
        N=cfg.N, K=cfg.K, s_max=cfg.s_max, t_max=cfg.t_max, n_s=cfg.n_s, n_t=cfg.n_t
    )
    ubar = negative_energy_endpoint(grid, spec, cfg.A, cfg.alpha)
    record = mpa_solve(
        ubar,
        spec,
        params,
        tol=cfg.tol,
        max_iter=cfg.max_iter,
        n_starts=cfg.n_starts,
        seed=cfg.seed,
    )
    rows = [_record_row(record, cfg.A, cfg.K)]
    extra: dict = {
        "path_max_history": record.path_max_history,
        "straight_path_bound": (
            float(record.path_max_history[0])
            if record.path_max_history is not None and len(record.path_max_history)
            else None
        ),
    }
    notes = [
        f"level {record.level:.8g}, residual {record.residual:.2e}, "
        f"nonradiality {record.nonradiality:.3f}"
    ]
    passed = record.converged
    if record.converged:
        verification = verify_solution(
            record, spec, params, n_tests=cfg.n_tests, seed=cfg.seed
        )
        extra["verification"] = verification
        passed = passed and verification["passed"]
        notes.append(
            "verification passed"
            if verification["passed"]
            else f"verification failed: {verification['failed']}"
        )
    try:
        extra["floor"] = mountain_pass_floor(grid, spec, params)
    except ValueError as exc:
        notes.append(f"small-sphere floor unavailable: {exc}")
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    profile_path = out / "solve_profile.txt"
    _write_profile(record.u_K, profile_path)
    notes.append(f"profile written to {profile_path}")
    return SweepReport(
        subcommand="solve",
        config=cfg.to_dict(),
        rows=rows,
        passed=passed,
        notes=notes,
        extra=extra,
    )


def _separation_rows(table, k: int) -> list[dict]:
    rows = []
    for row in table.rows:
        rows.append(
            {
                "A": row.A,
                "K": k,
                "c_estimate": row.c_estimate,
                "c_bound": row.c_bound,
                "m_lower": row.m_lower,
                "m_upper": row.m_upper,
                "separated": row.separated,
                "converged": row.converged,
                "nonradiality": row.nonradiality,
                "flags": list(row.flags),
            }
        )
    return rows


def _run_separate(cfg: ExperimentConfig) -> SweepReport:
    spec = _spec_of(cfg)
    params = ProblemParams(
        N=cfg.N, alpha=cfg.alpha, A=cfg.A, K=cfg.K, p1=cfg.p1, p2=cfg.p2
    )
    a_values = _a_list(cfg, np.geomspace(1e2, 1e4, 3))
    table = separation_check(
        params,
        spec,
        a_values,
        bump=_bump_of(cfg),
        grid_shape=(cfg.n_s, cfg.n_t),
        tol=cfg.tol,
        max_iter=cfg.max_iter,
        seed=cfg.seed,
    )
    rows = _separation_rows(table, cfg.K)
    passed = all(row["converged"] for row in rows)
    separated = [row["A"] for row in rows if row["separated"]]
    notes = [f"explicit curves cross at A* = {table.crossover_A:.6g}"]
    notes.append(
        f"separated at A in {{{', '.join(f'{a:g}' for a in separated)}}}"
        if separated
        else "no listed A is separated"
    )
    return SweepReport(
        subcommand="separate",
        config=cfg.to_dict(),
        rows=rows,
        passed=passed,
        notes=notes,
        extra={"crossover_A": table.crossover_A},
    )


def _run_theorem_demo(cfg: ExperimentConfig) -> SweepReport:
    spec = _spec_of(cfg)
    nu, ks = nu_and_admissible_K(cfg.N, cfg.alpha, cfg.p1, cfg.p2)
    a_values = _a_list(cfg, np.geomspace(1e2, 1e4, 3))
    a_demo = a_values[-1]
    notes = [f"nu={nu}, admissible K: {', '.join(str(k) for k in ks)}"]
    rows: list[dict] = []
    extra: dict = {"nu": nu, "admissible_K": list(ks), "A_demo": a_demo}
    passed = bool(ks)
    records: dict[int, object] = {}
    crossovers: dict[int, float] = {}
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    for k in ks:
        params = ProblemParams(
            N=cfg.N, alpha=cfg.alpha, A=a_demo, K=k, p1=cfg.p1, p2=cfg.p2
        )
        table = separation_check(
            params,
            spec,
            a_values,
            bump=_bump_of(cfg),
            grid_shape=(cfg.n_s, cfg.n_t),
            tol=cfg.tol,
            max_iter=cfg.max_iter,
            seed=cfg.seed,
        )
        k_rows = _separation_rows(table, k)
        rows.extend(k_rows)
        crossovers[k] = table.crossover_A
        passed = passed and all(row["converged"] for row in k_rows)
        record, _ = solve_well_scaled(
            params,
            spec,
            grid_shape=(cfg.n_s, cfg.n_t),
            tol=cfg.tol,
            max_iter=cfg.max_iter,
            seed=cfg.seed,
        )
        records[k] = record
        passed = passed and record.converged
        profile_path = out / f"theorem-demo_profile_K{k}.txt"
        _write_profile(record.u_K, profile_path)
        notes.append(
            f"K={k}: crossover {table.crossover_A:.6g}, demo level "
            f"{record.level:.8g} (converged={record.converged}), "
            f"profile -> {profile_path.name}"
        )

    distinctness: dict[str, float] = {}
    pairs = [(ks[i], ks[j]) for i in range(len(ks)) for j in range(i + 1, len(ks))]
    for ka, kb in pairs:
        d = profile_distance(
            records[ka].u_K, records[kb].u_K, a_demo, cfg.alpha
        )
        distinctness[f"{ka}-{kb}"] = d
        passed = passed and d > 0.0
        notes.append(f"distinctness |u_{ka} - u_{kb}|_A = {d:.6g}")
    extra["crossover_A"] = crossovers
    extra["distinctness"] = distinctness
    extra["demo_levels"] = {k: records[k].level for k in records}

    summary_path = out / "theorem-demo_summary.txt"
    lines = [
        "symmetric mountain-pass pipeline summary",
        f"N={cfg.N} alpha={cfg.alpha:g} p1={cfg.p1:g} p2={cfg.p2:g} "
        f"family={cfg.nonlinearity}",
        f"multiplicity count nu = {nu}; admissible K: "
        f"{', '.join(str(k) for k in ks)}",
        f"A sweep: {', '.join(f'{a:g}' for a in a_values)}; demo A = {a_demo:g}",
        "",
    ]
    for row in rows:
        lines.append(
            f"K={row['K']} A={row['A']:g}: c_estimate={row['c_estimate']:.6g} "
            f"m_lower={row['m_lower']:.6g} separated={row['separated']} "
            f"converged={row['converged']}"
        )
    lines.append("")
    for k in ks:
        lines.append(
            f"K={k}: explicit curves cross at A*={crossovers[k]:.6g}; "
            f"demo solve level {records[k].level:.8g}, "
            f"nonradiality {records[k].nonradiality:.3f}"
        )
    for pair, d in distinctness.items():
        lines.append(f"distinctness K pair {pair}: {d:.6g}")
    lines.append(f"overall passed: {passed}")
    summary_path.write_text("\n".join(lines) + "\n")
    notes.append(f"summary written to {summary_path}")
    return SweepReport(
        subcommand="theorem-demo",
        config=cfg.to_dict(),
        rows=rows,
        passed=passed,
        notes=notes,
        extra=extra,
    )


_HANDLERS = {
    "classify": _run_classify,
    "nu": _run_nu,
    "exponents": _run_exponents,
    "check-nonlinearity": _run_check_nonlinearity,
    "identities": _run_identities,
    "ratio": _run_ratio,
    "m-bounds": _run_m_bounds,
    "c-bounds": _run_c_bounds,
    "solve": _run_solve,
    "separate": _run_separate,
    "theorem-demo": _run_theorem_demo,
}


def run(subcommand: str, config: ExperimentConfig) -> SweepReport:
    """Execute one subcommand and write its report files.

    Returns the report; ``report.passed`` mirrors the process exit code.
    Rows are sorted by the swept variable (the A or epsilon lists are
    validated to be increasing); per-point failures are recorded as rows
    with an ``error`` key and never abort the sweep.
    """
    if subcommand not in _HANDLERS:
        raise ValueError(
            f"unknown subcommand {subcommand!r}; choose from {SUBCOMMANDS}"
        )
    config.validate()
    report = _HANDLERS[subcommand](config)
    report.version = _version_stamp()
    written = _write_outputs(report, Path(config.out_dir))
    report.notes.append(f"wrote {', '.join(written)}")
    return report


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="singwell",
        description=(
            "Numerical laboratory for a semilinear field equation with an "
            "inverse-power potential well: exponent maps, scaling identities, "
            "level bounds, and a symmetry-adapted mountain-pass solver."
        ),
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=f"run the {name} pipeline")
        p.add_argument("--config", type=str, default=None, help="JSON config file")
        p.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override one config field (repeatable)",
        )
        p.add_argument("--out", type=str, default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="RNG seed (u64)")
        p.add_argument("--threads", type=int, default=None, help="worker threads")
    args = parser.parse_args(argv)

    try:
        if args.config is not None:
            cfg = ExperimentConfig.from_json(Path(args.config).read_text())
        else:
            cfg = ExperimentConfig()
        cfg = cfg.with_overrides(args.set)
        overrides: dict = {}
        if args.out is not None:
            overrides["out_dir"] = args.out
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.threads is not None:
            overrides["threads"] = args.threads
        if overrides:
            cfg = replace(cfg, **overrides)
        report = run(args.subcommand, cfg)
    except (ValueError, OSError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    for note in report.notes:
        print(f"[{args.subcommand}] {note}")
    print(f"[{args.subcommand}] passed={report.passed}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
