"""Exact characteristic polynomials, eigenvalues and eigenvectors.

The pipeline is exact-first: restrictions to invariant degree spans are
rational matrices, characteristic polynomials come from the
Faddeev-LeVerrier recursion over Fractions, and rational eigenvalues are
extracted by divisor search with exact deflation.  Floating point enters
only when refining the remaining roots: Sturm sequences isolate the real
ones (refined by bisection plus a Newton polish), Durand-Kerner iteration
handles complex pairs, and every numeric root carries a certified residual
``|p(x)| / (1 + max|coeff|)``.

Cross-realization isospectrality is therefore a decidable, bit-exact
equality of characteristic polynomials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .realizations import (
    ComplexPlane,
    Realization,
    complex_fiber_matrix,
    realization_label,
    realize_matrix,
)
from .weyl import Rational, WeylElement, as_rational

Matrix = List[List[Rational]]

DEFAULT_ROOT_TOL = 1e-12
DEFAULT_ITER_CAP = 500
#: Numeric roots closer than this relative gap are merged into one root
#: with multiplicity.
CLUSTER_GAP = 1e-9


class LeakageError(Exception):
    """A restriction was requested on a non-invariant degree span."""

    def __init__(self, column: int, overflow: object):
        super().__init__(f"column {column} leaks out of the requested span")
        self.column = column
        self.overflow = overflow


class NonConvergenceError(Exception):
    """Numeric refinement failed; carries whatever roots were found."""

    def __init__(self, message: str, partial: Sequence["Eigenvalue"] = ()):
        super().__init__(message)
        self.partial = tuple(partial)


# ---------------------------------------------------------------------------
# Restriction to an invariant span
# ---------------------------------------------------------------------------


def restrict(
    u: WeylElement, r: Realization, n: int, fiber_m: int = 0
) -> Matrix:
    """The (n+1)x(n+1) matrix of ``u`` on the degree-n span of ``r``.

    Raises :class:`LeakageError` (with the witness column and overflow) if
    the span is not invariant.
    """
    fm = (
        complex_fiber_matrix(u, fiber_m, n)
        if isinstance(r, ComplexPlane)
        else realize_matrix(u, r, n)
    )
    if fm.has_leakage:
        col = min(fm.leakage)
        raise LeakageError(col, fm.leakage[col])
    return fm.to_rows()


# ---------------------------------------------------------------------------
# Exact linear algebra over Fraction
# ---------------------------------------------------------------------------


def _identity(n: int) -> Matrix:
    return [[Fraction(int(r == c)) for c in range(n)] for r in range(n)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, m, p = len(a), len(b), len(b[0]) if b else 0
    out = [[Fraction(0)] * p for _ in range(n)]
    for i in range(n):
        ai = a[i]
        for k in range(m):
            aik = ai[k]
            if not aik:
                continue
            bk = b[k]
            row = out[i]
            for j in range(p):
                row[j] += aik * bk[j]
    return out


def mat_vec(a: Matrix, v: Sequence[Rational]) -> List[Rational]:
    return [sum((row[j] * v[j] for j in range(len(v))), Fraction(0)) for row in a]


def _trace(a: Matrix) -> Rational:
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def nullspace(a: Matrix) -> List[Tuple[Rational, ...]]:
    """Basis of the exact nullspace, via reduced row echelon form."""
    if not a:
        return []
    rows = [list(map(Fraction, row)) for row in a]
    n_rows, n_cols = len(rows), len(rows[0])
    pivots: List[int] = []
    r = 0
    for c in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n_rows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    basis = []
    free = [c for c in range(n_cols) if c not in pivots]
    for fc in free:
        v = [Fraction(0)] * n_cols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fc]
        basis.append(tuple(v))
    return basis


# ---------------------------------------------------------------------------
# Characteristic polynomial
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CharPoly:
    """Monic polynomial with exact rational coefficients, ascending order."""

    coeffs: Tuple[Rational, ...]

    def __post_init__(self):
        cs = tuple(as_rational(c) for c in self.coeffs)
        if not cs or cs[-1] != 1:
            raise ValueError("characteristic polynomial must be monic")
        object.__setattr__(self, "coeffs", cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: Union[Rational, int]) -> Rational:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_complex(self, z: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + complex(c)
        return acc

    def text(self, var: str = "t") -> str:
        """Readable form such as ``t^2 - 8`` (highest degree first)."""
        parts: List[str] = []
        for d in range(self.degree, -1, -1):
            c = self.coeffs[d]
            if not c:
                continue
            if d == 0:
                body = str(abs(c))
            else:
                power = var if d == 1 else f"{var}^{d}"
                body = power if abs(c) == 1 else f"{abs(c)}*{power}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts) if parts else "0"


def char_poly(m: Matrix) -> CharPoly:
    """Exact monic characteristic polynomial by the Faddeev-LeVerrier
    recursion (no division beyond exact rationals)."""
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("characteristic polynomial needs a square matrix")
    m = [[as_rational(x) for x in row] for row in m]
    descending = [Fraction(1)]
    aux = _identity(n)
    work = m
    for k in range(1, n + 1):
        if k > 1:
            work = mat_mul(m, aux)
        ck = -_trace(work) / k
        descending.append(ck)
        aux = [row[:] for row in work]
        for i in range(n):
            aux[i][i] += ck
    return CharPoly(tuple(reversed(descending)))


# ---------------------------------------------------------------------------
# Roots
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Eigenvalue:
    """A root: exact rational, or a float approximation with certified
    residual ``|p(x)| / (1 + max|coeff|)``."""

    exact: Optional[Rational]
    re: float
    im: float
    residual: float

    @classmethod
    def from_exact(cls, r: Rational) -> "Eigenvalue":
        return cls(exact=r, re=float(r), im=0.0, residual=0.0)

    @classmethod
    def from_numeric(cls, re: float, im: float, residual: float) -> "Eigenvalue":
        return cls(exact=None, re=re, im=im, residual=residual)

    @property
    def is_exact(self) -> bool:
        return self.exact is not None


def _poly_eval(coeffs: Sequence[Rational], x: Rational) -> Rational:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _poly_deriv(coeffs: Sequence[Rational]) -> List[Rational]:
    return [d * c for d, c in enumerate(coeffs)][1:]


def _poly_monic(coeffs: Sequence[Rational]) -> List[Rational]:
    lead = coeffs[-1]
    return [c / lead for c in coeffs]


def _poly_divmod(num: Sequence[Rational], den: Sequence[Rational]):
    num = list(num)
    q = [Fraction(0)] * max(len(num) - len(den) + 1, 0)
    inv = 1 / den[-1]
    for shift in range(len(num) - len(den), -1, -1):
        f = num[shift + len(den) - 1] * inv
        q[shift] = f
        if f:
            for i, d in enumerate(den):
                num[shift + i] -= f * d
    while num and not num[-1]:
        num.pop()
    return q, num


def _poly_gcd(a: Sequence[Rational], b: Sequence[Rational]) -> List[Rational]:
    a, b = list(a), list(b)
    while b:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    return _poly_monic(a) if a else [Fraction(1)]


def _poly_sub(a: Sequence[Rational], b: Sequence[Rational]) -> List[Rational]:
    n = max(len(a), len(b))
    out = [
        (a[i] if i < len(a) else Fraction(0)) - (b[i] if i < len(b) else Fraction(0))
        for i in range(n)
    ]
    while out and not out[-1]:
        out.pop()
    return out


def _square_free_decomposition(coeffs: Sequence[Rational]):
    """Yun's algorithm: yields (factor, multiplicity), factors monic."""
    p = _poly_monic(list(coeffs))
    if len(p) <= 1:
        return
    dp = _poly_deriv(p)
    g = _poly_gcd(p, dp)
    if len(g) == 1:
        yield (p, 1)
        return
    c, _ = _poly_divmod(p, g)
    d = _poly_sub(_poly_divmod(dp, g)[0], _poly_deriv(c))
    mult = 1
    while len(c) > 1:
        f = _poly_gcd(c, d)
        if len(f) > 1:
            yield (_poly_monic(f), mult)
        c, _ = _poly_divmod(c, f)
        quot, _ = _poly_divmod(d, f)
        d = _poly_sub(quot, _poly_deriv(c))
        mult += 1


def _divisors(n: int, trial_bound: int = 1_000_000) -> List[int]:
    """Positive divisors via trial-division factorization.

    A cofactor surviving the trial bound is treated as a single prime, so
    divisors of astronomically composite constants can be missed; such roots
    then fall through to the certified numeric path.
    """
    n = abs(n)
    if n == 0:
        return [1]
    factors: dict[int, int] = {}
    for p in range(2, trial_bound + 1):
        if p * p > n:
            break
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    divs = [1]
    for p, e in factors.items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def _rational_roots(coeffs: List[Rational]) -> Tuple[List[Rational], List[Rational]]:
    """Extract all rational roots (with multiplicity) by divisor search and
    exact deflation; returns (roots, deflated monic remainder)."""
    roots: List[Rational] = []
    work = list(coeffs)
    while len(work) > 1 and not work[0]:
        roots.append(Fraction(0))
        work = work[1:]
    if len(work) <= 1:
        return roots, work
    denom_lcm = 1
    for c in work:
        denom_lcm = denom_lcm * c.denominator // math.gcd(denom_lcm, c.denominator)
    ints = [int(c * denom_lcm) for c in work]
    candidates = []
    for u in _divisors(ints[0]):
        for v in _divisors(ints[-1]):
            if math.gcd(u, v) == 1:
                candidates.append(Fraction(u, v))
                candidates.append(Fraction(-u, v))
    candidates.sort()
    for cand in candidates:
        while len(work) > 1 and _poly_eval(work, cand) == 0:
            roots.append(cand)
            work, rem = _poly_divmod(work, [-cand, Fraction(1)])
            assert not rem
    return roots, work


def _sturm_chain(coeffs: Sequence[Rational]) -> List[List[Rational]]:
    chain = [list(coeffs), _poly_deriv(coeffs)]
    while chain[-1]:
        _, r = _poly_divmod(chain[-2], chain[-1])
        chain.append([-c for c in r])
    chain.pop()
    return chain


def _variations(chain: Sequence[Sequence[Rational]], x: Rational) -> int:
    signs = []
    for p in chain:
        v = _poly_eval(p, x)
        if v:
            signs.append(1 if v > 0 else -1)
    return sum(1 for s1, s2 in zip(signs, signs[1:]) if s1 != s2)


def _isolate_real_roots(coeffs: List[Rational]) -> List[Tuple[Fraction, Fraction]]:
    """Disjoint open intervals, one simple real root each (square-free input
    with no rational roots, so endpoints are never roots)."""
    chain = _sturm_chain(coeffs)
    bound = Fraction(1) + max(abs(c) for c in coeffs[:-1]) / abs(coeffs[-1]) if len(coeffs) > 1 else Fraction(1)
    intervals: List[Tuple[Fraction, Fraction]] = []
    stack = [(-bound, bound, _variations(chain, -bound), _variations(chain, bound))]
    while stack:
        lo, hi, vlo, vhi = stack.pop()
        count = vlo - vhi
        if count <= 0:
            continue
        if count == 1:
            intervals.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        vmid = _variations(chain, mid)
        stack.append((lo, mid, vlo, vmid))
        stack.append((mid, hi, vmid, vhi))
    return sorted(intervals)


def _refine_real_root(
    coeffs: List[Rational], lo: Fraction, hi: Fraction, tol: float
) -> float:
    flo = _poly_eval(coeffs, lo)
    if flo == 0:  # pragma: no cover - rational roots were deflated already
        return float(lo)
    neg_left = flo < 0
    width_goal = Fraction(tol)
    while hi - lo > width_goal:
        mid = (lo + hi) / 2
        fmid = _poly_eval(coeffs, mid)
        if fmid == 0:  # pragma: no cover
            return float(mid)
        if (fmid < 0) == neg_left:
            lo = mid
        else:
            hi = mid
    # Newton polish in floating point; fall back to the bracket midpoint.
    fc = [float(c) for c in coeffs]
    dc = [float(c) for c in _poly_deriv(coeffs)]
    x = float((lo + hi) / 2)
    for _ in range(8):
        fx = _horner_float(fc, x)
        dfx = _horner_float(dc, x)
        if not dfx:
            break
        step = fx / dfx
        if not math.isfinite(step):
            break
        x -= step
        if abs(step) < 1e-17 * (1 + abs(x)):
            break
    if not (float(lo) - tol <= x <= float(hi) + tol):
        x = float((lo + hi) / 2)
    return x


def _horner_float(coeffs: Sequence[float], x: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _durand_kerner(
    coeffs: Sequence[Rational], tol: float, iter_cap: int
) -> List[complex]:
    """Simultaneous iteration for all roots of a square-free polynomial."""
    monic = [complex(c) for c in _poly_monic(list(coeffs))]
    deg = len(monic) - 1
    radius = 1 + max(abs(c) for c in monic[:-1]) if deg else 1.0
    seed = complex(0.4, 0.9)
    zs = [radius * seed ** (k + 1) for k in range(deg)]
    for _ in range(iter_cap):
        max_step = 0.0
        for i in range(deg):
            num = _horner_complex(monic, zs[i])
            den = 1 + 0j
            for j in range(deg):
                if j != i:
                    den *= zs[i] - zs[j]
            if den == 0:
                zs[i] += 1e-8 * (1 + abs(zs[i]))
                max_step = math.inf
                continue
            step = num / den
            zs[i] -= step
            max_step = max(max_step, abs(step))
        if max_step < 1e-15 * (1 + max(abs(z) for z in zs)):
            return zs
    raise NonConvergenceError(
        f"simultaneous root iteration did not converge in {iter_cap} steps"
    )


def _horner_complex(coeffs: Sequence[complex], z: complex) -> complex:
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def roots(
    p: CharPoly, tol: float = DEFAULT_ROOT_TOL, iter_cap: int = DEFAULT_ITER_CAP
) -> List[Eigenvalue]:
    """All roots of ``p`` as a multiset (list length equals the degree).

    Rational roots are exact.  Remaining real roots are isolated by Sturm
    sequences and refined by bisection with a Newton polish; complex pairs
    come from Durand-Kerner iteration.  Every numeric root is certified by
    its normalized residual, and numeric roots closer than the relative
    cluster gap are merged.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if p.degree == 0:
        return []
    scale = 1 + max(abs(float(c)) for c in p.coeffs)
    exact_roots, remainder = _rational_roots(list(p.coeffs))
    numeric: List[Tuple[float, float, int]] = []  # (re, im, multiplicity)
    if len(remainder) > 1:
        for factor, mult in _square_free_decomposition(remainder):
            real_spots = _isolate_real_roots(factor)
            for lo, hi in real_spots:
                numeric.append((_refine_real_root(factor, lo, hi, tol), 0.0, mult))
            n_complex = len(factor) - 1 - len(real_spots)
            if n_complex:
                try:
                    approx = _durand_kerner(factor, tol, iter_cap)
                except NonConvergenceError as err:
                    raise NonConvergenceError(
                        str(err),
                        partial=[Eigenvalue.from_exact(r) for r in exact_roots],
                    ) from None
                complex_ones = sorted(
                    approx, key=lambda z: abs(z.imag), reverse=True
                )[:n_complex]
                paired = [z for z in complex_ones if z.imag > 0]
                for z in paired:
                    partner = min(
                        (w for w in complex_ones if w.imag < 0),
                        key=lambda w: abs(w - z.conjugate()),
                    )
                    re = (z.real + partner.real) / 2
                    im = (z.imag - partner.imag) / 2
                    numeric.append((re, im, mult))
                    numeric.append((re, -im, mult))
    numeric = _merge_clusters(numeric)
    out = [Eigenvalue.from_exact(r) for r in sorted(exact_roots)]
    for re, im, mult in sorted(numeric, key=lambda t: (t[0], t[1])):
        residual = abs(p.eval_complex(complex(re, im))) / scale
        if residual > tol:
            raise NonConvergenceError(
                f"root {re}+{im}j failed residual certification "
                f"({residual:.3e} > {tol:.3e})",
                partial=out,
            )
        out.extend([Eigenvalue.from_numeric(re, im, residual)] * mult)
    assert len(out) == p.degree
    return out


def _merge_clusters(
    numeric: List[Tuple[float, float, int]]
) -> List[Tuple[float, float, int]]:
    merged: List[Tuple[float, float, int]] = []
    for re, im, mult in sorted(numeric, key=lambda t: (t[0], t[1])):
        for idx, (mre, mim, mmult) in enumerate(merged):
            if abs(complex(re, im) - complex(mre, mim)) <= CLUSTER_GAP * (
                1 + abs(complex(re, im))
            ):
                merged[idx] = (mre, mim, mmult + mult)
                break
        else:
            merged.append((re, im, mult))
    return merged


# ---------------------------------------------------------------------------
# Eigenvectors
# ---------------------------------------------------------------------------


def eigenvector(
    m: Matrix, ev: Eigenvalue, tol: float = DEFAULT_ROOT_TOL
) -> List[Tuple]:
    """Nullspace basis of ``M - ev`` (usually one vector).

    Exact eigenvalues give the exact rational nullspace, each basis vector
    normalized so its highest-index nonzero entry is 1 (leading polynomial
    coefficient).  Numeric eigenvalues use inverse iteration and the result
    is checked against ``||Mv - ev v|| <= 10 * tol``.
    """
    n = len(m)
    if ev.is_exact:
        shifted = [[m[i][j] - (ev.exact if i == j else 0) for j in range(n)] for i in range(n)]
        basis = nullspace(shifted)
        if not basis:
            raise ValueError(f"{ev.exact} is not an eigenvalue of the matrix")
        normalized = []
        for v in basis:
            lead = next(c for c in reversed(v) if c)
            normalized.append(tuple(c / lead for c in v))
        return normalized

    a = np.array([[float(x) for x in row] for row in m])
    lam = complex(ev.re, ev.im)
    eye = np.eye(n)
    if ev.im:
        a = a.astype(complex)
        eye = eye.astype(complex)
    v = np.ones(n, dtype=a.dtype) / math.sqrt(n)
    shift = lam if ev.im else ev.re
    for _ in range(50):
        try:
            w = np.linalg.solve(a - shift * eye, v)
        except np.linalg.LinAlgError:
            shift = shift * (1 + 1e-13) + 1e-300
            continue
        norm = np.linalg.norm(w)
        if not np.isfinite(norm) or norm == 0:
            shift = shift * (1 + 1e-13) + 1e-300
            continue
        v = w / norm
        if np.linalg.norm(a @ v - lam * v) <= 10 * tol:
            return [tuple(v.tolist())]
    raise NonConvergenceError(
        f"inverse iteration failed to certify an eigenvector at {lam}"
    )


# ---------------------------------------------------------------------------
# Assembled spectra and isospectrality
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Spectrum:
    """Characteristic polynomial plus eigenpairs of one restriction."""

    operator: str
    realization: str
    degree: int
    char_poly: CharPoly
    eigenpairs: Tuple[Tuple[Eigenvalue, Tuple], ...]


def spectrum(
    u: WeylElement,
    n: int,
    r: Realization,
    operator_label: str = "",
    tol: float = DEFAULT_ROOT_TOL,
    iter_cap: int = DEFAULT_ITER_CAP,
    fiber_m: int = 0,
) -> Spectrum:
    """Restrict, solve and pair eigenvalues with eigenvector coefficients."""
    matrix = restrict(u, r, n, fiber_m=fiber_m)
    cp = char_poly(matrix)
    evs = roots(cp, tol=tol, iter_cap=iter_cap)
    pairs = []
    seen: set = set()
    for ev in evs:
        key = ev.exact if ev.is_exact else (ev.re, ev.im)
        if key in seen:
            continue  # one eigenvector set per distinct eigenvalue
        seen.add(key)
        for vec in eigenvector(matrix, ev, tol=tol):
            pairs.append((ev, vec))
    return Spectrum(
        operator=operator_label,
        realization=realization_label(r) + (f" m={fiber_m}" if isinstance(r, ComplexPlane) else ""),
        degree=n,
        char_poly=cp,
        eigenpairs=tuple(pairs),
    )


@dataclass(frozen=True)
class IsospectralReport:
    """Characteristic polynomials of one operator across realizations."""

    degree: int
    entries: Tuple[Tuple[str, CharPoly], ...]
    all_equal: bool


def isospectral_check(
    u: WeylElement,
    n: int,
    realizations: Sequence[Realization],
    fiber_ms: Sequence[int] = (0,),
) -> IsospectralReport:
    """Compare characteristic polynomials bit-exactly across realizations,
    always including the complex-plane fibers listed in ``fiber_ms``."""
    entries: List[Tuple[str, CharPoly]] = []
    for r in realizations:
        if isinstance(r, ComplexPlane):
            continue
        entries.append((realization_label(r), char_poly(restrict(u, r, n))))
    for m in fiber_ms:
        entries.append(
            (f"complex m={m}", char_poly(restrict(u, ComplexPlane(), n, fiber_m=m)))
        )
    first = entries[0][1] if entries else None
    all_equal = all(cp == first for _, cp in entries)
    return IsospectralReport(degree=n, entries=tuple(entries), all_equal=all_equal)
