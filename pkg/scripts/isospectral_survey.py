#!/usr/bin/env python3
"""Survey the catalog operators across every realization.

Prints, for each operator at its invariant degree, the exact characteristic
polynomial obtained from the differential, two uniform-lattice, two
exponential-lattice and five complex-plane fiber matrices, plus the verdict
that all of them coincide bit-exactly.
"""

from fractions import Fraction as F

from fockspec.catalog import hermite, laguerre, lame, sextic
from fockspec.realizations import DeltaLattice, Differential, QLattice
from fockspec.spectra import isospectral_check, roots

REALIZATIONS = [
    Differential(),
    DeltaLattice(1),
    DeltaLattice(F(1, 3)),
    QLattice(2),
    QLattice(F(1, 2)),
]

CASES = [
    (hermite(), 5),
    (laguerre(F(3, 2)), 5),
    (lame(2, 1, 1), 1),
    (lame(2, 1, 3), 3),
    (sextic(1, 0, 1), 1),
    (sextic(1, 1, 2), 2),
]


def describe(spec, n):
    report = isospectral_check(spec.element, n, REALIZATIONS, fiber_ms=range(5))
    params = ", ".join(f"{k}={v}" for k, v in spec.params.items())
    label = f"{spec.name}({params})" if params else spec.name
    print(f"{label}  degree n = {n}")
    print(f"  char poly: {report.entries[0][1].text()}")
    for ev in roots(report.entries[0][1]):
        if ev.is_exact:
            print(f"    eigenvalue {ev.exact} (exact)")
        else:
            print(f"    eigenvalue {ev.re:+.12f}{ev.im:+.12f}j  residual {ev.residual:.2e}")
    verdict = "identical" if report.all_equal else "DIFFER"
    print(f"  {len(report.entries)} realizations/fibers: {verdict}")
    print()


def main():
    for spec, n in CASES:
        describe(spec, n)


if __name__ == "__main__":
    main()
