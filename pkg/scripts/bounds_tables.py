#!/usr/bin/env python3
"""Print a-priori bound tables over a grid of a = K2*B*eta values.

Usage: python scripts/bounds_tables.py [a ...]

With no arguments, uses the grid 0.1 0.25 0.4 0.5.  For each a the script
prints the first rows of the derivative-known and derivative-free bound
sequences side by side, plus the convergence radius s*.
"""
import sys

from adimsolve.bounds import (majorizing_roots, newton_sequences,
                              steffensen_sequences)

N_ROWS = 8


def print_table(a: float) -> None:
    roots = majorizing_roots(a)
    ns = newton_sequences(a, N_ROWS)
    ss = steffensen_sequences(a, N_ROWS)
    print(f"a = {a:g}   s* = {roots.s_star:.12g}   "
          f"s** = {roots.s_star_star:.12g}")
    print(f"{'n':>3} {'d_n (newton)':>16} {'r_n (newton)':>16} "
          f"{'d_n (steffensen)':>18} {'r_n (steffensen)':>18}")
    r_newton = ns.partial_sums
    for n in range(min(N_ROWS, len(ss.d_seq))):
        print(f"{n:>3} {ns.d_seq[n]:>16.10g} {r_newton[n]:>16.10g} "
              f"{ss.d_seq[n]:>18.10g} {ss.r_seq[n]:>18.10g}")
    print()


def main() -> int:
    grid = [float(v) for v in sys.argv[1:]] or [0.1, 0.25, 0.4, 0.5]
    for a in grid:
        if a > 0.5:
            print(f"a = {a:g}: hypotheses not satisfied (a > 1/2), skipped\n")
            continue
        print_table(a)
    return 0


if __name__ == "__main__":
    sys.exit(main())
