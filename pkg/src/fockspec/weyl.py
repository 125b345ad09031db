"""Exact normal-ordered calculus for the Heisenberg enveloping algebra.

An element is a finite sum ``sum A[i,j] * b^i * a^j`` with exact rational
coefficients, where the generators satisfy ``a*b - b*a = 1``.  The normal
form keeps every ``b`` to the left of every ``a``; products are reordered
with the closed formula

    a^j * b^i = sum_k  k! * C(i,k) * C(j,k) * b^(i-k) * a^(j-k),

which the test suite validates against iterated rewriting of ``a*b`` into
``b*a + 1``.

The abstract state space is spanned by vectors ``b^k|0>`` with ``a|0> = 0``,
so a monomial acts through the falling factorial:

    b^i a^j : b^k|0>  ->  k(k-1)...(k-j+1) * b^(k-j+i)|0>.

All values are immutable after construction and every operation is a pure
function, so elements can be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Tuple, Union

Rational = Fraction
RationalLike = Union[Fraction, int, str]

#: Default bound on each generator exponent.  Exceeding it is a hard error,
#: never a silent truncation.
DEFAULT_DEGREE_CAP = 64


class DegreeOverflowError(Exception):
    """Raised when a generator exponent exceeds the configured cap."""

    def __init__(self, exponent: int, cap: int):
        super().__init__(f"generator exponent {exponent} exceeds degree cap {cap}")
        self.exponent = exponent
        self.cap = cap


def as_rational(value: RationalLike) -> Rational:
    """Coerce an int, Fraction or ``"p/q"`` string to an exact rational."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational scalar")
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def falling(k: int, j: int) -> int:
    """Falling factorial ``k (k-1) ... (k-j+1)``; zero when ``j > k >= 0``."""
    out = 1
    for t in range(j):
        out *= k - t
    return out


TermKey = Tuple[int, int]
TermMap = Mapping[TermKey, Rational]


class WeylElement:
    """Normal-ordered element: a map from ``(b-exp, a-exp)`` to coefficient.

    The stored map is the unique normal form; zero coefficients are never
    kept.  Instances are immutable and hashable.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Union[TermMap, Iterable[Tuple[TermKey, RationalLike]], None] = None):
        acc: dict[TermKey, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else (terms or ())
        for (i, j), c in items:
            i, j = int(i), int(j)
            if i < 0 or j < 0:
                raise ValueError(f"negative generator exponent ({i}, {j})")
            c = as_rational(c)
            if c:
                key = (i, j)
                acc[key] = acc.get(key, Fraction(0)) + c
        object.__setattr__(self, "_terms", {k: v for k, v in acc.items() if v})

    # -- basic structure ---------------------------------------------------

    @property
    def terms(self) -> TermMap:
        """Read-only view of the normal form."""
        return MappingProxyType(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def b_degree(self) -> int:
        """Largest b-exponent, or -1 for the zero element."""
        return max((i for i, _ in self._terms), default=-1)

    @property
    def a_degree(self) -> int:
        """Largest a-exponent, or -1 for the zero element."""
        return max((j for _, j in self._terms), default=-1)

    def coefficient(self, i: int, j: int) -> Rational:
        return self._terms.get((i, j), Fraction(0))

    @classmethod
    def zero(cls) -> "WeylElement":
        return cls()

    @classmethod
    def identity(cls) -> "WeylElement":
        return cls({(0, 0): Fraction(1)})

    # -- equality / hashing ------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, WeylElement):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == WeylElement({(0, 0): other})
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    # -- arithmetic sugar (delegates to the module-level operations) --------

    def __add__(self, other: Union["WeylElement", RationalLike]) -> "WeylElement":
        if isinstance(other, WeylElement):
            return add(self, other)
        return add(self, WeylElement({(0, 0): other}))

    __radd__ = __add__

    def __neg__(self) -> "WeylElement":
        return scale(Fraction(-1), self)

    def __sub__(self, other: Union["WeylElement", RationalLike]) -> "WeylElement":
        return self + (-other if isinstance(other, WeylElement) else -as_rational(other))

    def __rsub__(self, other: RationalLike) -> "WeylElement":
        return (-self) + other

    def __mul__(self, other: Union["WeylElement", RationalLike]) -> "WeylElement":
        if isinstance(other, WeylElement):
            return multiply(self, other)
        return scale(as_rational(other), self)

    def __rmul__(self, other: RationalLike) -> "WeylElement":
        return scale(as_rational(other), self)

    def __truediv__(self, other: RationalLike) -> "WeylElement":
        return scale(1 / as_rational(other), self)

    def __pow__(self, n: int) -> "WeylElement":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        out = WeylElement.identity()
        for _ in range(n):
            out = multiply(out, self)
        return out

    # -- canonical text form -------------------------------------------------

    def __str__(self) -> str:
        return canonical_text(self)

    def __repr__(self) -> str:
        return f"WeylElement({canonical_text(self)!r})"


def canonical_order(key: TermKey) -> Tuple[int, int]:
    """Sort key: descending total degree, then descending a-exponent."""
    i, j = key
    return (-(i + j), -j)


def canonical_text(u: WeylElement) -> str:
    """Deterministic text form, e.g. ``-1*a^2 + b*a``.

    Terms are joined by ``" + "``; each term prints as ``c*b^i*a^j`` with
    unit coefficients and zero exponents omitted.  The zero element prints
    as ``"0"``.  Parsing the output reproduces the element exactly.
    """
    if u.is_zero:
        return "0"
    parts = []
    for (i, j) in sorted(u._terms, key=canonical_order):
        c = u._terms[(i, j)]
        gens = []
        if i:
            gens.append("b" if i == 1 else f"b^{i}")
        if j:
            gens.append("a" if j == 1 else f"a^{j}")
        if not gens:
            parts.append(str(c))
        elif c == 1:
            parts.append("*".join(gens))
        else:
            parts.append("*".join([str(c)] + gens))
    return " + ".join(parts)


# ---------------------------------------------------------------------------
# Core operations
# ---------------------------------------------------------------------------


def make(coeff: RationalLike, i: int, j: int, cap: int = DEFAULT_DEGREE_CAP) -> WeylElement:
    """Single-term element ``coeff * b^i * a^j`` (zero element if coeff is 0)."""
    if i < 0 or j < 0:
        raise ValueError(f"negative generator exponent ({i}, {j})")
    for e in (i, j):
        if e > cap:
            raise DegreeOverflowError(e, cap)
    return WeylElement({(i, j): coeff})


def add(u: WeylElement, v: WeylElement) -> WeylElement:
    acc = dict(u._terms)
    for key, c in v._terms.items():
        acc[key] = acc.get(key, Fraction(0)) + c
    return WeylElement(acc)


def scale(c: RationalLike, u: WeylElement) -> WeylElement:
    c = as_rational(c)
    if not c:
        return WeylElement.zero()
    return WeylElement({key: c * v for key, v in u._terms.items()})


def multiply(u: WeylElement, v: WeylElement, cap: int = DEFAULT_DEGREE_CAP) -> WeylElement:
    """Exact normal form of the noncommutative product ``u * v``.

    Crossing the a-block of one term past the b-block of the next uses the
    closed reordering formula; exponents beyond ``cap`` raise.
    """
    acc: dict[TermKey, Fraction] = {}
    for (i1, j1), c1 in u._terms.items():
        for (i2, j2), c2 in v._terms.items():
            if i1 + i2 > cap:
                raise DegreeOverflowError(i1 + i2, cap)
            if j1 + j2 > cap:
                raise DegreeOverflowError(j1 + j2, cap)
            c12 = c1 * c2
            kfact = 1
            for k in range(min(j1, i2) + 1):
                if k:
                    kfact *= k
                coeff = c12 * (kfact * comb(j1, k) * comb(i2, k))
                key = (i1 + i2 - k, j1 + j2 - k)
                acc[key] = acc.get(key, Fraction(0)) + coeff
    return WeylElement(acc)


def commutator(u: WeylElement, v: WeylElement, cap: int = DEFAULT_DEGREE_CAP) -> WeylElement:
    return add(multiply(u, v, cap), scale(-1, multiply(v, u, cap)))


@dataclass(frozen=True)
class FockVector:
    """Vector ``sum coeffs[k] * b^k|0>``; trailing zeros trimmed, () is zero."""

    coeffs: Tuple[Rational, ...] = ()

    def __post_init__(self):
        cs = tuple(as_rational(c) for c in self.coeffs)
        while cs and not cs[-1]:
            cs = cs[:-1]
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def basis(cls, k: int, coeff: RationalLike = 1) -> "FockVector":
        c = as_rational(coeff)
        if not c:
            return cls()
        return cls((Fraction(0),) * k + (c,))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Top degree with nonzero coefficient, or -1 for the zero vector."""
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Rational:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __add__(self, other: "FockVector") -> "FockVector":
        n = max(len(self.coeffs), len(other.coeffs))
        return FockVector(tuple(self[k] + other[k] for k in range(n)))

    def scale(self, c: RationalLike) -> "FockVector":
        c = as_rational(c)
        return FockVector(tuple(c * v for v in self.coeffs))


def fock_apply(u: WeylElement, k: int) -> FockVector:
    """Exact image of ``b^k|0>`` under ``u`` via the falling-factorial action."""
    if k < 0:
        raise ValueError("basis degree must be nonnegative")
    acc: dict[int, Fraction] = {}
    for (i, j), c in u._terms.items():
        if j > k:
            continue
        deg = k - j + i
        acc[deg] = acc.get(deg, Fraction(0)) + c * falling(k, j)
    if not acc:
        return FockVector()
    top = max(acc)
    return FockVector(tuple(acc.get(d, Fraction(0)) for d in range(top + 1)))


@dataclass(frozen=True, eq=False)
class FlagMatrix:
    """Matrix of an operator on a degree-filtered basis, plus overflow records.

    ``entries[r][c]`` is the coefficient of basis vector ``r`` in the image of
    basis vector ``c``.  ``leakage`` maps a column to the part of its image
    that escapes the truncated basis: a :class:`FockVector` of degrees beyond
    the cut for Fock and univariate bases, a bivariate remainder for
    complex-plane fiber bases.  Empty leakage for every column means the
    truncated span is invariant.
    """

    entries: Tuple[Tuple[Rational, ...], ...]
    leakage: Mapping[int, object]

    def __post_init__(self):
        object.__setattr__(self, "leakage", MappingProxyType(dict(self.leakage)))

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def has_leakage(self) -> bool:
        return bool(self.leakage)

    def column(self, k: int) -> Tuple[Rational, ...]:
        return tuple(row[k] for row in self.entries)

    def diagonal(self) -> Tuple[Rational, ...]:
        return tuple(self.entries[k][k] for k in range(self.size))

    def is_upper_triangular(self) -> bool:
        return all(
            not self.entries[r][c] for r in range(self.size) for c in range(r)
        )

    def to_rows(self) -> list[list[Rational]]:
        """Mutable copy for downstream exact linear algebra."""
        return [list(row) for row in self.entries]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FlagMatrix):
            return NotImplemented
        return self.entries == other.entries and dict(self.leakage) == dict(other.leakage)


def flag_matrix(u: WeylElement, n_max: int, cap: int = DEFAULT_DEGREE_CAP) -> FlagMatrix:
    """Matrix of ``u`` on the basis ``{b^k|0>, k = 0..n_max}``.

    Column ``k`` is ``fock_apply(u, k)`` split into in-range entries and an
    overflow record for degrees above ``n_max``.
    """
    if n_max < 0:
        raise ValueError("matrix size bound must be nonnegative")
    if n_max > cap:
        raise DegreeOverflowError(n_max, cap)
    size = n_max + 1
    rows = [[Fraction(0)] * size for _ in range(size)]
    leakage: dict[int, FockVector] = {}
    for k in range(size):
        image = fock_apply(u, k)
        overflow: dict[int, Fraction] = {}
        for d, c in enumerate(image.coeffs):
            if not c:
                continue
            if d <= n_max:
                rows[d][k] = c
            else:
                overflow[d] = c
        if overflow:
            top = max(overflow)
            leakage[k] = FockVector(
                tuple(overflow.get(d, Fraction(0)) for d in range(top + 1))
            )
    return FlagMatrix(tuple(tuple(r) for r in rows), leakage)


def eval_poly_in_L0(coeffs: Sequence[RationalLike], cap: int = DEFAULT_DEGREE_CAP) -> WeylElement:
    """Normal form of ``P(b*a)`` for ``P(t) = sum coeffs[k] t^k`` (Horner)."""
    number_op = make(1, 1, 1, cap)
    out = WeylElement.zero()
    for c in reversed([as_rational(c) for c in coeffs]):
        out = add(multiply(out, number_op, cap), WeylElement({(0, 0): c}))
    return out
