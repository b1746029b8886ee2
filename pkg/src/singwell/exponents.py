"""Exact exponent arithmetic for the inverse-power potential well.

Everything in this module is closed-form binary64 arithmetic: the Sobolev-type
critical exponents attached to (N, alpha), the existence / nonexistence /
no-radial-solution map in the (alpha, p) plane, the multiplicity count of
admissible symmetry indices K, and the growth exponents (in the well depth A)
of the radial and nonradial energy levels whose gap drives symmetry breaking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

__all__ = [
    "ProblemParams",
    "ExponentTable",
    "RegionStatus",
    "RegionVerdict",
    "critical_exponents",
    "classify_region",
    "nu_and_admissible_K",
    "level_exponents",
]

# Relative band for equality tests on region boundaries.
_REL_BAND = 1e-12


def _cmp(a: float, b: float) -> int:
    """Three-way comparison with a relative equality band."""
    tol = _REL_BAND * max(1.0, abs(a), abs(b))
    if abs(a - b) <= tol:
        return 0
    return -1 if a < b else 1


@dataclass(frozen=True)
class ProblemParams:
    """Parameters of one problem instance: dimension, potential, well depth,
    symmetry split K, and the two growth exponents of the nonlinearity."""

    N: int
    alpha: float
    A: float
    K: int
    p1: float
    p2: float

    def __post_init__(self) -> None:
        if self.N < 3:
            raise ValueError(f"N must be >= 3, got {self.N}")
        if not 0.0 < self.alpha:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.A <= 0.0:
            raise ValueError(f"A must be positive, got {self.A}")
        if not 2 <= self.K <= self.N - 2:
            raise ValueError(f"K must lie in [2, N-2] = [2, {self.N - 2}], got {self.K}")
        if not 2.0 < self.p1 <= self.p2:
            raise ValueError(f"need 2 < p1 <= p2, got p1={self.p1}, p2={self.p2}")

    @property
    def two_star(self) -> float:
        return 2.0 * self.N / (self.N - 2.0)


@dataclass(frozen=True)
class ExponentTable:
    """Critical exponents attached to (N, alpha); fields that are not defined
    for the given alpha are None, never NaN."""

    N: int
    alpha: float
    two_star: float
    two_star_alpha: float | None  # defined iff alpha < 2N-2
    two_alpha: float | None       # defined iff alpha < N
    p1_star: float | None         # relevant threshold for alpha < 2
    p2_star: float | None         # relevant threshold for 2 < alpha < 2N-2


class RegionStatus(Enum):
    EXISTS_RADIAL = "ExistsRadial"
    NO_SOLUTION = "NoSolution"
    NO_RADIAL_SOLUTION = "NoRadialSolution"
    OPEN = "Open"


@dataclass(frozen=True)
class RegionVerdict:
    status: RegionStatus
    rule: str
    table: ExponentTable


def critical_exponents(N: int, alpha: float) -> ExponentTable:
    """Closed-form exponent table for dimension N and potential power alpha.

    two_star is the Sobolev critical exponent 2N/(N-2); two_star_alpha is the
    critical exponent of the weighted radial embedding, 2(2N-2+alpha)/(2N-2-alpha);
    two_alpha = 2N/(N-alpha) marks where the potential term stops controlling
    the |u|^p mass.  p1_star and p2_star are the thresholds on the nonlinearity
    growth under which the multiplicity count below is at least one.
    """
    if N < 3:
        raise ValueError(f"N must be >= 3, got {N}")
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    two_star = 2.0 * N / (N - 2.0)
    two_star_alpha = None
    if _cmp(alpha, 2.0 * N - 2.0) < 0:
        two_star_alpha = 2.0 * (2.0 * N - 2.0 + alpha) / (2.0 * N - 2.0 - alpha)
    two_alpha = None
    if _cmp(alpha, float(N)) < 0:
        two_alpha = 2.0 * N / (N - alpha)
    p1_star = None
    if _cmp(alpha, 2.0) < 0:
        a2 = alpha * alpha * (N - 1.0)
        p1_star = 2.0 * (a2 - 2.0 * alpha * (N - 1.0) + 4.0 * N) / (
            a2 - 2.0 * alpha * (N + 1.0) + 4.0 * N
        )
    p2_star = None
    if _cmp(alpha, 2.0) > 0 and _cmp(alpha, 2.0 * N - 2.0) < 0:
        p2_star = 2.0 * (2.0 * N + 2.0 - alpha) / (2.0 * N - 2.0 - alpha)
    return ExponentTable(
        N=N,
        alpha=alpha,
        two_star=two_star,
        two_star_alpha=two_star_alpha,
        two_alpha=two_alpha,
        p1_star=p1_star,
        p2_star=p2_star,
    )


def classify_region(N: int, alpha: float, p: float) -> RegionVerdict:
    """Classify the pure-power problem at (alpha, p): positive solution exists
    (radial), no solution at all, radial solutions excluded, or open.

    Boundary lines p = two_star and p = two_alpha carry no solution except the
    single point (alpha, p) = (2, two_star).  Verdicts are only emitted where
    one of the implemented results applies; everything else is OPEN.
    """
    if p <= 2.0:
        raise ValueError(f"p must exceed 2, got {p}")
    table = critical_exponents(N, alpha)
    ts = table.two_star
    ca2 = _cmp(alpha, 2.0)

    if ca2 == 0:
        if _cmp(p, ts) == 0:
            return RegionVerdict(RegionStatus.EXISTS_RADIAL, "alpha = 2 and p = 2N/(N-2)", table)
        return RegionVerdict(RegionStatus.NO_SOLUTION, "alpha = 2 and p != 2N/(N-2)", table)

    if ca2 < 0:
        # 0 < alpha < 2: two_alpha < two_star_alpha < two_star
        assert table.two_alpha is not None and table.two_star_alpha is not None
        if _cmp(p, table.two_alpha) <= 0:
            return RegionVerdict(
                RegionStatus.NO_SOLUTION, "alpha < 2 and p <= 2N/(N-alpha)", table
            )
        if _cmp(p, ts) >= 0:
            return RegionVerdict(
                RegionStatus.NO_SOLUTION, "alpha < 2 and p >= 2N/(N-2)", table
            )
        if _cmp(p, table.two_star_alpha) <= 0:
            return RegionVerdict(
                RegionStatus.NO_RADIAL_SOLUTION,
                "alpha < 2 and 2N/(N-alpha) < p <= 2(2N-2+alpha)/(2N-2-alpha)",
                table,
            )
        return RegionVerdict(
            RegionStatus.EXISTS_RADIAL,
            "alpha < 2 and 2(2N-2+alpha)/(2N-2-alpha) < p < 2N/(N-2)",
            table,
        )

    # alpha > 2
    if _cmp(p, ts) <= 0:
        return RegionVerdict(RegionStatus.NO_SOLUTION, "alpha > 2 and p <= 2N/(N-2)", table)
    if _cmp(alpha, 2.0 * N - 2.0) >= 0:
        return RegionVerdict(
            RegionStatus.EXISTS_RADIAL, "alpha >= 2N-2 and p > 2N/(N-2)", table
        )
    assert table.two_star_alpha is not None
    if _cmp(alpha, float(N)) < 0:
        assert table.two_alpha is not None
        if _cmp(p, table.two_alpha) >= 0:
            return RegionVerdict(
                RegionStatus.NO_SOLUTION, "2 < alpha < N and p >= 2N/(N-alpha)", table
            )
        if _cmp(p, table.two_star_alpha) >= 0:
            return RegionVerdict(
                RegionStatus.NO_RADIAL_SOLUTION,
                "2 < alpha < N and 2(2N-2+alpha)/(2N-2-alpha) <= p < 2N/(N-alpha)",
                table,
            )
        return RegionVerdict(
            RegionStatus.EXISTS_RADIAL,
            "2 < alpha < N and 2N/(N-2) < p < 2(2N-2+alpha)/(2N-2-alpha)",
            table,
        )
    # N <= alpha < 2N-2: the weighted-mass obstruction is void, only the
    # existence strip below two_star_alpha is covered by a result.
    if _cmp(p, table.two_star_alpha) < 0:
        return RegionVerdict(
            RegionStatus.EXISTS_RADIAL,
            "N <= alpha < 2N-2 and 2N/(N-2) < p < 2(2N-2+alpha)/(2N-2-alpha)",
            table,
        )
    return RegionVerdict(RegionStatus.OPEN, "", table)


def _ceiling_argument(N: int, alpha: float, p1: float, p2: float) -> float:
    """The real number whose ceiling (minus one) is the multiplicity count."""
    ts = 2.0 * N / (N - 2.0)
    if alpha < 2.0:
        m = min((N - 1.0) / alpha, (N - 2.0) / (2.0 - alpha) * (ts - p1) / (p1 - 2.0))
        return 2.0 * m - 2.0 * N * (1.0 / alpha - 0.5)
    m = min((N - 1.0) / alpha, (N - 2.0) / (alpha - 2.0) * (p2 - ts) / (p2 - 2.0))
    return 2.0 * m


def _check_nu_preconditions(N: int, alpha: float, p1: float, p2: float) -> ExponentTable:
    if N < 4:
        raise ValueError(f"multiplicity count needs N >= 4, got N={N}")
    table = critical_exponents(N, alpha)
    lo = 2.0 / (N - 1.0)
    hi = 2.0 * N - 2.0
    if not lo < alpha < hi or _cmp(alpha, 2.0) == 0:
        raise ValueError(
            f"alpha must lie in ({lo:g}, {hi:g}) excluding 2, got alpha={alpha}"
        )
    ts = table.two_star
    if not 2.0 < p1 < ts < p2:
        raise ValueError(f"need 2 < p1 < {ts:g} < p2, got p1={p1}, p2={p2}")
    if alpha < 2.0:
        assert table.p1_star is not None
        if not p1 < table.p1_star:
            raise ValueError(
                f"subcritical growth threshold violated: need p1 < {table.p1_star:.12g}, "
                f"got p1={p1}"
            )
    else:
        assert table.p2_star is not None
        if not p2 > table.p2_star:
            raise ValueError(
                f"supercritical growth threshold violated: need p2 > {table.p2_star:.12g}, "
                f"got p2={p2}"
            )
    return table


def nu_and_admissible_K(N: int, alpha: float, p1: float, p2: float) -> tuple[int, tuple[int, ...]]:
    """Multiplicity count nu and the admissible symmetry indices K.

    nu is ceil(x) - 1 for the closed-form ceiling argument x; the admissible
    K are 2..nu+1 clamped to the geometric range [2, N-2].  The returned nu is
    the unclamped count, so callers can see when the dimension, not the
    exponents, is the binding constraint.
    """
    _check_nu_preconditions(N, alpha, p1, p2)
    x = _ceiling_argument(N, alpha, p1, p2)
    nu = math.ceil(x) - 1
    k_hi = min(nu + 1, N - 2)
    K_list = tuple(range(2, k_hi + 1))
    return nu, K_list


def level_exponents(N: int, alpha: float, p1: float, p2: float, K: int) -> tuple[float, float, float]:
    """Growth exponents in A of the radial level floor (m_exp) and of the
    K-symmetric mountain-pass upper bound (c_exp), plus their gap.

    The symmetry index K is admissible exactly when the gap is positive.
    """
    table = critical_exponents(N, alpha)
    ts = table.two_star
    if not 2.0 < p1 < ts < p2:
        raise ValueError(f"need 2 < p1 < {ts:g} < p2, got p1={p1}, p2={p2}")
    if K < 2:
        raise ValueError(f"K must be >= 2, got {K}")
    if alpha < 2.0:
        m_exp = min((N - 1.0) / alpha, (N - 2.0) / (2.0 - alpha) * (ts - p1) / (p1 - 2.0))
        c_exp = (K - 1.0) / 2.0 + N * (1.0 / alpha - 0.5)
    elif alpha > 2.0:
        if alpha >= 2.0 * N - 2.0:
            raise ValueError(f"alpha must be below 2N-2 = {2 * N - 2}, got {alpha}")
        m_exp = min((N - 1.0) / alpha, (N - 2.0) / (alpha - 2.0) * (p2 - ts) / (p2 - 2.0))
        c_exp = (K - 1.0) / 2.0
    else:
        raise ValueError("level exponents are not defined at alpha = 2")
    return m_exp, c_exp, m_exp - c_exp
