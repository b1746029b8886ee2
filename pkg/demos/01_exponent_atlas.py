"""How many symmetric excited states does the equation support, and where?

The closed-form arithmetic in ``singwell.exponents`` answers this before any
grid is built.  For the equation  -Delta u + A |x|^(-alpha) u = f(u)  on R^N,
the multiplicity count nu(N, alpha, p1, p2) says how many distinct symmetry
classes of positive solutions appear once the coupling A is large, and the
admissible indices K label those classes (a K-symmetric solution concentrates
on a (K-1)-sphere orbit inside R^N).

This script prints an atlas of nu over the potential steepness alpha for a
few dimensions, the growth thresholds that gate the count, and the per-class
level exponents whose gap drives everything downstream.

Run:  python3 demos/01_exponent_atlas.py
"""

from __future__ import annotations

import numpy as np

from singwell import (
    classify_region,
    critical_exponents,
    level_exponents,
    nu_and_admissible_K,
)


def pick_growth(N: int, alpha: float) -> tuple[float, float]:
    """Canonical admissible growth pair (p1, p2) for the given (N, alpha)."""
    table = critical_exponents(N, alpha)
    if alpha < 2.0:
        # shallow potential: the count is gated by p1 staying below p1_star
        p1 = 0.5 * (2.0 + min(table.p1_star, table.two_star))
        p2 = table.two_star + 1.0
    else:
        # steep potential: the count is gated by p2 exceeding p2_star
        p1 = 0.5 * (2.0 + table.two_star)
        p2 = table.p2_star + 1.0
    return p1, p2


def main() -> None:
    print(__doc__)

    print("=== multiplicity atlas (canonical growth pair per cell) ===")
    alphas = (0.8, 1.0, 1.5, 2.5, 3.0, 5.0)
    header = "  N | " + " | ".join(f"alpha={a:<4g}" for a in alphas)
    print(header)
    print("-" * len(header))
    for N in (4, 5, 6, 8):
        cells = []
        for alpha in alphas:
            if not 2.0 / (N - 1.0) < alpha < 2.0 * N - 2.0 or alpha == 2.0:
                cells.append("--".center(11))
                continue
            p1, p2 = pick_growth(N, alpha)
            nu, K_list = nu_and_admissible_K(N, alpha, p1, p2)
            # admissible K are always the contiguous band 2..max
            ks = f"2..{K_list[-1]}" if len(K_list) > 1 else "2" if K_list else "-"
            cells.append(f"nu={nu} K:{ks}".ljust(11))
        print(f"  {N} | " + " | ".join(cells))
    print("(-- marks alpha outside the admissible band (2/(N-1), 2N-2)\\{2})")

    print()
    print("=== growth thresholds for two reference instances ===")
    for N, alpha in ((4, 1.0), (5, 3.0)):
        t = table = critical_exponents(N, alpha)
        print(f"N={N}, alpha={alpha:g}:")
        print(f"  Sobolev-critical 2*      = {t.two_star:.12g}")
        if t.two_star_alpha is not None:
            print(f"  weighted-radial critical = {t.two_star_alpha:.12g}")
        if t.p1_star is not None:
            print(f"  p1 threshold (alpha<2)   = {t.p1_star:.12g}")
        if t.p2_star is not None:
            print(f"  p2 threshold (alpha>2)   = {t.p2_star:.12g}")

    print()
    print("=== level exponents: radial floor vs K-symmetric ceiling ===")
    print("The radial energy floor grows like A^m_exp; the K-symmetric")
    print("mountain-pass level is capped by ~A^c_exp.  A positive gap means")
    print("the K-symmetric state eventually drops below every radial one.")
    for N, alpha, p1, p2 in ((4, 1.0, 2.5, 5.0), (5, 3.0, 3.0, 6.0)):
        nu, K_list = nu_and_admissible_K(N, alpha, p1, p2)
        print(f"(N={N}, alpha={alpha:g}, p1={p1:g}, p2={p2:g}): nu={nu}")
        for K in K_list:
            m_exp, c_exp, gap = level_exponents(N, alpha, p1, p2, K)
            print(
                f"  K={K}: m_exp={m_exp:.6g}, c_exp={c_exp:.6g}, gap={gap:+.6g}"
            )

    print()
    print("=== single-power reference map f(u) = u^(p-1) ===")
    for N, alpha, p in ((4, 2.0, 4.0), (4, 1.0, 3.0), (4, 6.0, 5.0)):
        verdict = classify_region(N, alpha, p)
        print(
            f"(N={N}, alpha={alpha:g}, p={p:g}) -> {verdict.status.value}: "
            f"{verdict.rule}"
        )


if __name__ == "__main__":
    main()
