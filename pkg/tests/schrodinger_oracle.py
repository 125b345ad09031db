"""Test-only finite-difference oracle for one-dimensional Schrodinger
problems ``-psi'' + V(tau) psi = E psi`` with a polynomial potential.

Independent of the package under test: plain second-order central
differences on a uniform grid with Dirichlet walls, diagonalized as a
tridiagonal matrix.
"""

import numpy as np
from scipy.linalg import eigh_tridiagonal


def schrodinger_energies(c6, c4, c2, c0, count=12, half_width=5.0, n_points=4001):
    """Lowest ``count`` eigenvalues of -psi'' + (c6 t^6 + c4 t^4 + c2 t^2 + c0) psi."""
    grid = np.linspace(-half_width, half_width, n_points)[1:-1]
    h = grid[1] - grid[0]
    c6, c4, c2, c0 = (float(c) for c in (c6, c4, c2, c0))
    potential = c6 * grid**6 + c4 * grid**4 + c2 * grid**2 + c0
    diag = 2.0 / h**2 + potential
    off = np.full(len(grid) - 1, -1.0 / h**2)
    return eigh_tridiagonal(
        diag, off, select="i", select_range=(0, count - 1), eigvals_only=True
    )
