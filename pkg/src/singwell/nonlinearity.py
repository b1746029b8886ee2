"""Admissible nonlinearities f and their primitives F for the field equation.

The class of nonlinearities is a double-power growth class: f is trapped
between the powers s^(p1-1) and s^(p2-1) (the smaller of the two at each s),
with 2 < p1 < p2.  All constructions truncate at zero: f(s) = F(s) = 0 for
s <= 0, so critical points of the energy are nonnegative.

Three built-in families, each with closed-form or table-accurate primitives:

* ``MinPower``            f(s) = min{s^(p1-1), s^(p2-1)}
* ``RationalQuotient``    f(s) = s^(p2-1) / (1 + s^(p2-p1))
* ``RationalDerivative``  f(s) = d/ds [ s^p2 / (1 + s^(p2-p1)) ]

``check_assumptions`` runs sampled falsifiers for the five structural
assumptions the energy analysis needs (double-power envelope, superquadratic
growth, positive primitive, increasing slope ratio, decreasing normalized
primitive).  The checks are falsifiers on a dense log grid, not proofs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

__all__ = [
    "NonlinearitySpec",
    "AssumptionCheck",
    "AssumptionReport",
    "make_builtin",
    "make_custom",
    "check_assumptions",
    "find_mu",
]

_BUILTIN_FAMILIES = ("MinPower", "RationalQuotient", "RationalDerivative")

# Window used to fit the envelope constants M1, M2.  It is deliberately
# narrower than the assumption-check grid [1e-6, 1e6]: a candidate that only
# pretends to have double-power growth (e.g. a pure power) gets envelope
# constants fitted here and is then falsified on the wider grid.
_FIT_WINDOW = (1e-3, 1e3)
_FIT_POINTS = 2001


@dataclass(frozen=True)
class NonlinearitySpec:
    """Immutable bundle of a nonlinearity: growth exponents, structural
    constants, and vectorized callables f, F and (optionally) f'."""

    family: str
    p1: float
    p2: float
    theta: float
    mu: float
    M1: float
    M2: float
    f: Callable = field(repr=False)
    F: Callable = field(repr=False)
    fprime: Callable | None = field(default=None, repr=False)

    def with_theta(self, theta: float) -> "NonlinearitySpec":
        return replace(self, theta=theta)

    def with_mu(self, mu: float) -> "NonlinearitySpec":
        return replace(self, mu=mu)


def _truncated(core: Callable) -> Callable:
    """Vectorize `core` over positive arguments and return 0 elsewhere."""

    def wrapped(s):
        arr = np.asarray(s, dtype=float)
        scalar = arr.ndim == 0
        a = np.atleast_1d(arr)
        out = np.zeros(a.shape, dtype=float)
        m = a > 0.0
        if m.any():
            with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
                out[m] = core(a[m])
        if scalar:
            return float(out[0])
        return out.reshape(arr.shape)

    return wrapped


def _min_power_callables(p1: float, p2: float):
    def f_core(s):
        return np.minimum(s ** (p1 - 1.0), s ** (p2 - 1.0))

    def F_core(s):
        low = s**p2 / p2
        high = 1.0 / p2 + (s**p1 - 1.0) / p1
        return np.where(s <= 1.0, low, high)

    def fp_core(s):
        low = (p2 - 1.0) * s ** (p2 - 2.0)
        high = (p1 - 1.0) * s ** (p1 - 2.0)
        return np.where(s <= 1.0, low, high)

    return _truncated(f_core), _truncated(F_core), _truncated(fp_core)


def _rational_quotient_f(p1: float, p2: float):
    q = p2 - p1

    def f_core(s):
        # stable on both ends: divide by the dominant power
        small = s ** (p2 - 1.0) / (1.0 + s**q)
        large = s ** (p1 - 1.0) / (1.0 + s ** (-q))
        return np.where(s <= 1.0, small, large)

    return f_core


class _LogPanelPrimitive:
    """Cumulative primitive F(s) = int_0^s f(t) dt computed once on a panel
    table in y = log t (12-point Gauss-Legendre per panel of width 0.25) with
    a power-series closure below the table.  Queries interpolate by an exact
    partial-panel integral, giving ~1e-14 relative accuracy."""

    _GLX, _GLW = np.polynomial.legendre.leggauss(12)

    def __init__(self, f_core: Callable, p2: float, q: float):
        self.f_core = f_core
        self.p2 = p2
        self.q = q
        self._build(-28.0, 28.0)

    def _g(self, y):
        # integrand after substitution t = e^y: f(e^y) e^y, stable both sides
        with np.errstate(over="ignore"):
            return self.f_core(np.exp(y)) * np.exp(y)

    def _series(self, s):
        """Alternating series of int_0^s t^{p2-1}/(1+t^q) dt, for small s."""
        p2, q = self.p2, self.q
        out = np.zeros_like(s)
        term_pow = np.ones_like(s)
        sq = s**q
        for k in range(400):
            expo = p2 + k * q
            contrib = (-1.0) ** k * s**p2 * term_pow / expo
            out += contrib
            term_pow = term_pow * sq
            if np.all(np.abs(contrib) <= 1e-18 * np.abs(out) + 1e-300):
                break
        return out

    def _build(self, y_lo: float, y_hi: float):
        width = 0.25
        n_panels = int(math.ceil((y_hi - y_lo) / width))
        edges = y_lo + width * np.arange(n_panels + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * width
        ys = mid[:, None] + half * self._GLX[None, :]
        panel_ints = (self._g(ys) * (half * self._GLW[None, :])).sum(axis=1)
        base = float(self._series(np.array([math.exp(y_lo)]))[0])
        self.y_edges = edges
        self.cum = base + np.concatenate([[0.0], np.cumsum(panel_ints)])

    def __call__(self, s):
        y = np.log(s)
        lo, hi = self.y_edges[0], self.y_edges[-1]
        if np.any(y > hi):
            self._build(lo, float(np.max(y)) + 1.0)
            hi = self.y_edges[-1]
        out = np.empty_like(s)
        small = y <= lo
        if small.any():
            out[small] = self._series(s[small])
        big = ~small
        if big.any():
            yb = y[big]
            j = np.clip(np.searchsorted(self.y_edges, yb) - 1, 0, len(self.y_edges) - 2)
            a = self.y_edges[j]
            half = 0.5 * (yb - a)
            ys = (a + half)[:, None] + half[:, None] * self._GLX[None, :]
            partial = (self._g(ys) * (half[:, None] * self._GLW[None, :])).sum(axis=1)
            out[big] = self.cum[j] + partial
        return out


def _rational_quotient_callables(p1: float, p2: float):
    q = p2 - p1
    f_core = _rational_quotient_f(p1, p2)
    table = _LogPanelPrimitive(f_core, p2, q)

    def fp_core(s):
        # f'(s) = s^{p2-2} [(p2-1) + (p1-1) s^q] / (1+s^q)^2, stabilized
        small = s ** (p2 - 2.0) * ((p2 - 1.0) + (p1 - 1.0) * s**q) / (1.0 + s**q) ** 2
        large = (
            s ** (p1 - 2.0)
            * ((p2 - 1.0) * s ** (-q) + (p1 - 1.0))
            / (1.0 + s ** (-q)) ** 2
        )
        return np.where(s <= 1.0, small, large)

    return _truncated(f_core), _truncated(table), _truncated(fp_core)


def _rational_derivative_callables(p1: float, p2: float):
    q = p2 - p1

    def F_core(s):
        small = s**p2 / (1.0 + s**q)
        large = s**p1 / (1.0 + s ** (-q))
        return np.where(s <= 1.0, small, large)

    def f_core(s):
        # d/ds of F: s^{p2-1} (p2 + p1 s^q) / (1+s^q)^2, stabilized
        small = s ** (p2 - 1.0) * (p2 + p1 * s**q) / (1.0 + s**q) ** 2
        large = s ** (p1 - 1.0) * (p2 * s ** (-q) + p1) / (1.0 + s ** (-q)) ** 2
        return np.where(s <= 1.0, small, large)

    def fp_core(s):
        D = 1.0 + s**q
        inner = (p2 - 1.0) * (p2 + p1 * s**q) + p1 * q * s**q - 2.0 * q * s**q * (
            p2 + p1 * s**q
        ) / D
        small = s ** (p2 - 2.0) * inner / D**2
        E = 1.0 + s ** (-q)
        inner_l = (
            (p2 - 1.0) * (p2 * s ** (-q) + p1)
            + p1 * q
            - 2.0 * q * (p2 * s ** (-q) + p1) / E
        )
        large = s ** (p1 - 2.0) * inner_l / E**2
        return np.where(s <= 1.0, small, large)

    return _truncated(f_core), _truncated(F_core), _truncated(fp_core)


def _fit_envelopes(f: Callable, F: Callable, p1: float, p2: float) -> tuple[float, float]:
    """Envelope constants: M2 from the sampled supremum of F over the
    double-power envelope (1.01 safety factor), M1 = M2 * max(p1, p2),
    raised if the sampled f-ratio demands more."""
    s = np.geomspace(*_FIT_WINDOW, _FIT_POINTS)
    env_F = np.minimum(s**p1, s**p2)
    env_f = np.minimum(s ** (p1 - 1.0), s ** (p2 - 1.0))
    ratio_F = np.max(np.abs(F(s)) / env_F)
    ratio_f = np.max(np.abs(f(s)) / env_f)
    if not (np.isfinite(ratio_F) and np.isfinite(ratio_f)):
        raise ValueError("envelope fit failed: f or F not finite on the fit window")
    M2 = 1.01 * float(ratio_F)
    M1 = max(M2 * max(p1, p2), 1.01 * float(ratio_f))
    return M1, M2


def make_builtin(family: str, p1: float, p2: float) -> NonlinearitySpec:
    """Construct a built-in nonlinearity.  theta = p1 for all three families;
    mu = p2 + 1 (any value above p2 works; this one is fixed for
    determinism).  Envelope constants are fitted by sampling."""
    if not 2.0 < p1 < p2:
        raise ValueError(f"need 2 < p1 < p2, got p1={p1}, p2={p2}")
    canonical = {fam.lower(): fam for fam in _BUILTIN_FAMILIES}
    key = family.replace("_", "").replace("-", "").lower()
    if key not in canonical:
        raise ValueError(f"unknown family {family!r}; choose from {_BUILTIN_FAMILIES}")
    family = canonical[key]
    if family == "MinPower":
        f, F, fp = _min_power_callables(p1, p2)
    elif family == "RationalQuotient":
        f, F, fp = _rational_quotient_callables(p1, p2)
    else:
        f, F, fp = _rational_derivative_callables(p1, p2)
    M1, M2 = _fit_envelopes(f, F, p1, p2)
    return NonlinearitySpec(
        family=family, p1=p1, p2=p2, theta=p1, mu=p2 + 1.0,
        M1=M1, M2=M2, f=f, F=F, fprime=fp,
    )


def make_custom(
    f: Callable,
    F: Callable,
    p1: float,
    p2: float,
    fprime: Callable | None = None,
    theta: float | None = None,
    mu: float | None = None,
    truncate: bool = True,
) -> NonlinearitySpec:
    """Wrap user callables as a spec.  The callables must accept positive
    ndarray input; truncation at zero is applied unless already built in.
    theta defaults to p1 and mu to p2 + 1; run check_assumptions to see
    whether the resulting spec actually satisfies the structural assumptions.
    """
    if not 2.0 < p1 < p2:
        raise ValueError(f"need 2 < p1 < p2, got p1={p1}, p2={p2}")
    fv = _truncated(f) if truncate else f
    Fv = _truncated(F) if truncate else F
    fpv = (_truncated(fprime) if truncate else fprime) if fprime is not None else None
    M1, M2 = _fit_envelopes(fv, Fv, p1, p2)
    return NonlinearitySpec(
        family="Custom", p1=p1, p2=p2,
        theta=p1 if theta is None else theta,
        mu=p2 + 1.0 if mu is None else mu,
        M1=M1, M2=M2, f=fv, F=Fv, fprime=fpv,
    )


@dataclass(frozen=True)
class AssumptionCheck:
    name: str
    description: str
    passed: bool
    worst_margin: float
    violating_s: tuple[float, ...]

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "passed": self.passed,
            "worst_margin": self.worst_margin,
            "violating_s": list(self.violating_s),
        }


@dataclass(frozen=True)
class AssumptionReport:
    family: str
    p1: float
    p2: float
    theta: float
    mu: float
    checks: tuple[AssumptionCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "p1": self.p1,
            "p2": self.p2,
            "theta": self.theta,
            "mu": self.mu,
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
        }


def _margin_check(name: str, description: str, s: np.ndarray, margins: np.ndarray,
                  tol: float = -1e-11) -> AssumptionCheck:
    worst = float(np.min(margins))
    bad = s[margins <= tol]
    passed = bad.size == 0
    return AssumptionCheck(
        name=name, description=description, passed=passed, worst_margin=worst,
        violating_s=tuple(float(x) for x in bad[:10]),
    )


def check_assumptions(spec: NonlinearitySpec, sample_count: int = 4096) -> AssumptionReport:
    """Sampled falsifiers for the five structural assumptions, on a log grid
    s in [1e-6, 1e6].  Margins are normalized so that positive means
    satisfied with room; a FAIL lists up to ten violating sample points.
    Failures are data, not errors."""
    if sample_count < 1000:
        raise ValueError(f"sample_count must be >= 1000, got {sample_count}")
    s = np.geomspace(1e-6, 1e6, sample_count)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        fs = spec.f(s)
        Fs = spec.F(s)
        env_f = spec.M1 * np.minimum(s ** (spec.p1 - 1.0), s ** (spec.p2 - 1.0))
        env_F = spec.M2 * np.minimum(s**spec.p1, s**spec.p2)

        env_margin = np.minimum((env_f - np.abs(fs)) / env_f, (env_F - np.abs(Fs)) / env_F)
        envelope = _margin_check(
            "double_power_envelope",
            f"|f| <= M1*min(s^(p1-1), s^(p2-1)) and |F| <= M2*min(s^p1, s^p2) "
            f"with M1={spec.M1:.6g}, M2={spec.M2:.6g}",
            s, env_margin,
        )

        denom = np.where(fs * s > 0, fs * s, np.inf)
        ar_margin = np.where(
            fs * s > 0, (fs * s - spec.theta * Fs) / denom,
            np.where(Fs > 0, -1.0, 1.0),
        )
        superquadratic = _margin_check(
            "superquadratic",
            f"theta*F(s) <= f(s)*s with theta={spec.theta:.6g} (> 2)",
            s, ar_margin,
        )

        pos_margin = Fs / env_F
        positive_primitive = _margin_check(
            "positive_primitive", "F(s) > 0 for all s > 0", s, pos_margin, tol=0.0,
        )

        slope = fs / s
        dslope = np.diff(slope) / np.maximum(slope[:-1], 1e-300)
        slope_incr = _margin_check(
            "slope_ratio_increasing",
            "f(s)/s strictly increasing on (0, inf) [consecutive-sample check]",
            s[:-1], dslope,
        )

        mu_margin = np.where(env_F > 0, (spec.mu * Fs - fs * s) / np.maximum(spec.mu * Fs, 1e-300), 1.0)
        normalized_decreasing = _margin_check(
            "normalized_primitive_decreasing",
            f"F(s)/s^mu nonincreasing with mu={spec.mu:.6g} "
            "(equivalently f(s)*s <= mu*F(s))",
            s, mu_margin,
        )

    return AssumptionReport(
        family=spec.family, p1=spec.p1, p2=spec.p2, theta=spec.theta, mu=spec.mu,
        checks=(envelope, superquadratic, positive_primitive, slope_incr, normalized_decreasing),
    )


def find_mu(spec: NonlinearitySpec, sample_count: int = 4096) -> float:
    """Smallest safe exponent mu for the decreasing-normalized-primitive
    condition, found numerically: the sampled supremum of f(s)s/F(s) plus a
    small relative margin (and at least slightly above 2)."""
    if sample_count < 1000:
        raise ValueError(f"sample_count must be >= 1000, got {sample_count}")
    s = np.geomspace(1e-6, 1e6, sample_count)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        fs = spec.f(s)
        Fs = spec.F(s)
        ratio = np.where(Fs > 0, fs * s / Fs, 0.0)
    sup = float(np.max(ratio[np.isfinite(ratio)]))
    return max(sup * (1.0 + 1e-6), 2.0 + 1e-6)
