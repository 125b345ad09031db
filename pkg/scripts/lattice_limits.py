#!/usr/bin/env python3
"""Watch the lattice realizations collapse onto the differential one.

For the Hermite operator the matrix entries on the degree-6 span are exact
rationals in the lattice parameter; this prints the largest entrywise
deviation from the differential matrix as the spacing shrinks (delta = 2^-t)
and the dilation approaches one (q = 1 + 2^-t).
"""

from fractions import Fraction as F

from fockspec.catalog import hermite
from fockspec.realizations import DeltaLattice, Differential, QLattice, realize_matrix

N = 6


def max_deviation(matrix, target):
    return max(
        abs(matrix.entries[r][c] - target[r][c])
        for r in range(N + 1)
        for c in range(N + 1)
    )


def main():
    element = hermite().element
    target = realize_matrix(element, Differential(), N).entries
    print(f"operator: {element}   span degree: {N}")
    print(f"{'t':>3} {'delta = 2^-t deviation':>28} {'q = 1 + 2^-t deviation':>28}")
    for t in range(0, 13, 2):
        step = F(1, 2**t)
        d_dev = max_deviation(realize_matrix(element, DeltaLattice(step), N), target)
        q_dev = max_deviation(realize_matrix(element, QLattice(1 + step), N), target)
        print(f"{t:>3} {float(d_dev):>28.3e} {float(q_dev):>28.3e}")


if __name__ == "__main__":
    main()
