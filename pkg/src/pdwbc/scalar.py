"""Exact and extended-precision numeric kernels.

Everything exact is carried as :class:`fractions.Fraction`.  Extended precision
floats are :class:`mpmath.mpf` evaluated under an explicit working precision.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import mpmath

Rational = Fraction

DEFAULT_PRECISION = 256


class DomainError(ValueError):
    pass


class ConsistencyError(RuntimeError):
    """Two independent computations of the same exact quantity disagree."""


class PrecisionError(ArithmeticError):
    """Raised when a floating computation cannot be trusted at the given precision."""

    def __init__(self, message: str, suggested_precision: int):
        super().__init__(f"{message} (try precision >= {suggested_precision} bits)")
        self.suggested_precision = suggested_precision
        self.suggested_precision = suggested_precision


def default_precision() -> int:
    env = os.environ.get("PDWBC_PRECISION")
    if env:
        prec = int(env)
        if prec < 64:
            raise ValueError("PDWBC_PRECISION must be at least 64")
        return prec
    return DEFAULT_PRECISION


def parse_rational(text: str) -> Fraction:
    """Parse ``"num/den"`` or an integer literal.  Decimal points are rejected."""
    text = text.strip()
    if any(ch in text for ch in ".eE"):
        raise ValueError(f"expected an exact rational 'num/den', got {text!r}")
    return Fraction(text)


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def to_mpf(x, prec: int | None = None) -> mpmath.mpf:
    """Round an exact or float value to an mpf at ``prec`` bits (nearest-even)."""
    if isinstance(x, Fraction):
        with mpmath.workprec(prec or mpmath.mp.prec):
            return mpmath.mpf(x.numerator) / x.denominator
    with mpmath.workprec(prec or mpmath.mp.prec):
        return mpmath.mpf(x)


def exact_sqrt(x: Fraction) -> Fraction | None:
    """Square root of a nonnegative rational if it is itself rational."""
    if x < 0:
        return None
    rn, rd = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if rn * rn == x.numerator and rd * rd == x.denominator:
        return Fraction(rn, rd)
    return None


# ---------------------------------------------------------------------------
# negative-order polylogarithms
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _polylog_numerator(k: int) -> tuple[int, ...]:
    # Sum_{x>=1} x^k r^x = N_k(r) / (1-r)^(k+1), with N_0 = r.
    # Applying r d/dr:  N_{k+1} = r(1-r) N_k' + (k+1) r N_k.
    if k == 0:
        return (0, 1)
    prev = _polylog_numerator(k - 1)
    deg = len(prev)
    out = [0] * (deg + 1)
    for i, c in enumerate(prev):
        if c == 0:
            continue
        # r(1-r) * i c r^(i-1) = i c r^i - i c r^(i+1)
        out[i] += i * c
        out[i + 1] -= i * c
        out[i + 1] += k * c
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


def eulerian_polynomial(k: int) -> tuple[int, ...]:
    """Coefficients (ascending) of A_k with sum_{x>=1} x^k r^x = r A_k(r)/(1-r)^(k+1)."""
    if k < 0:
        raise DomainError("k must be nonnegative")
    return _polylog_numerator(k)[1:]


def _check_ratio(r):
    if not (0 < r < 1):
        raise DomainError(f"ratio must lie in (0, 1), got {r}")


def negorder_polylog(k: int, r):
    """Exact sum_{x>=1} x^k r^x for 0 < r < 1.

    Works for Fraction (exact) and mpf (at the ambient mpmath precision).
    """
    if k < 0:
        raise DomainError("k must be nonnegative")
    _check_ratio(r)
    if isinstance(r, Fraction):
        return _negorder_polylog_exact(k, r)
    num = 0
    for c in reversed(_polylog_numerator(k)):
        num = num * r + c
    return num / (1 - r) ** (k + 1)


@lru_cache(maxsize=4096)
def _negorder_polylog_exact(k: int, r: Fraction) -> Fraction:
    # Homogeneous integer Horner: N(a/b) b^deg = sum_i c_i a^i b^(deg-i).
    a, b = r.numerator, r.denominator
    coeffs = _polylog_numerator(k)
    deg = len(coeffs) - 1
    num, bpow = 0, 1
    for c in reversed(coeffs):
        num = num * a + c * bpow
        bpow *= b
    bpow //= b
    return Fraction(num, bpow) / (1 - r) ** (k + 1)


# ---------------------------------------------------------------------------
# polynomials and rational functions
# ---------------------------------------------------------------------------

def _trim(coeffs: Iterable) -> tuple:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class Polynomial:
    """Dense univariate polynomial, coefficients in ascending degree."""

    coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls((c,))

    @classmethod
    def x(cls) -> "Polynomial":
        return cls((0, 1))

    @classmethod
    def from_roots(cls, roots: Iterable) -> "Polynomial":
        p = cls((1,))
        for r in roots:
            p = p * cls((-r, 1))
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else 0

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return Polynomial(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial(tuple(c * other for c in self.coeffs))
        if self.is_zero() or other.is_zero():
            return Polynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = Polynomial((1,))
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def derivative(self) -> "Polynomial":
        return Polynomial(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def shift(self, a) -> "Polynomial":
        """Return the polynomial x -> P(x + a)."""
        out = Polynomial()
        for c in reversed(self.coeffs):
            out = out * Polynomial((a, 1)) + Polynomial((c,))
        return out

    def abs_coeffs(self) -> "Polynomial":
        return Polynomial(tuple(abs(c) for c in self.coeffs))

    def divmod(self, other: "Polynomial"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = [Fraction(c) for c in self.coeffs]
        quot = [Fraction(0)] * max(len(rem) - other.degree, 1)
        lead = Fraction(other.leading)
        while len(rem) - 1 >= other.degree and any(rem):
            shift = len(rem) - 1 - other.degree
            f = rem[-1] / lead
            quot[shift] = f
            for i, c in enumerate(other.coeffs):
                rem[shift + i] -= f * c
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        return Polynomial(tuple(quot)), Polynomial(tuple(rem))

    def monic(self) -> "Polynomial":
        lead = Fraction(self.leading)
        return Polynomial(tuple(Fraction(c) / lead for c in self.coeffs))

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        return self.coeffs == _as_poly(other).coeffs

    def __hash__(self):
        return hash(self.coeffs)


def _as_poly(x) -> Polynomial:
    return x if isinstance(x, Polynomial) else Polynomial((x,))


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd over the rationals."""
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    if a.is_zero():
        return Polynomial((Fraction(1),))
    return a.monic()


@dataclass(frozen=True)
class RationalFunction:
    """num(z)/den(z).  Not kept in lowest terms unless :meth:`normalized` is used.

    When the denominator is known to be ``base ** power`` it can be recorded;
    derivatives then cancel the shared factor without any gcd computation.
    """

    num: Polynomial
    den: Polynomial
    base: Polynomial | None = None
    power: int = 1

    def __post_init__(self):
        if self.den.is_zero():
            raise ZeroDivisionError("zero denominator")

    @classmethod
    def with_power_den(cls, num: Polynomial, base: Polynomial, power: int) -> "RationalFunction":
        return cls(num, base ** power, base, power)

    def __call__(self, z):
        return self.num(z) / self.den(z)

    def normalized(self) -> "RationalFunction":
        g = poly_gcd(self.num, self.den)
        num, den = self.num.divmod(g)[0], self.den.divmod(g)[0]
        lead = Fraction(den.leading)
        return RationalFunction(num * (1 / lead), den * (1 / lead))

    def t_derivative(self) -> "RationalFunction":
        return rf_t_derivative(self)


def rf_t_derivative(F: RationalFunction) -> RationalFunction:
    """d/dt of F(z) with z = e^{2t}, i.e. 2z dF/dz, by the quotient rule.

    For a recorded denominator B^e the common factor B^(e-1) is cancelled:
    d/dt N/B^e = 2z (N' B - e N B') / B^(e+1).
    """
    N = F.num
    two_z = Polynomial((0, 2))
    if F.base is not None:
        B, e = F.base, F.power
        num = two_z * (N.derivative() * B - N * B.derivative() * e)
        return RationalFunction.with_power_den(num, B, e + 1)
    D = F.den
    return RationalFunction(two_z * (N.derivative() * D - N * D.derivative()), D * D)


def poly_geometric_sum(P: Polynomial, r, x0: int = 0):
    """Exact sum_{x >= x0} P(x) r^x for 0 < r < 1."""
    _check_ratio(r)
    if x0 < 0:
        raise DomainError("x0 must be nonnegative")
    Q = P.shift(x0) if x0 else P
    total = 0
    for k, c in enumerate(Q.coeffs):
        if c == 0:
            continue
        s = negorder_polylog(k, r)
        if k == 0:
            s = s + 1
        total = total + c * s
    return total * r ** x0


# ---------------------------------------------------------------------------
# quadratic surds a + b sqrt(d)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadSurd:
    """Element a + b*sqrt(d) of Q(sqrt d); d is a positive non-square rational."""

    a: Fraction
    b: Fraction
    d: Fraction

    def _coerce(self, other) -> "QuadSurd":
        if isinstance(other, QuadSurd):
            if other.d != self.d:
                raise ValueError("mixing different quadratic fields")
            return other
        return QuadSurd(Fraction(other), Fraction(0), self.d)

    def __add__(self, other):
        o = self._coerce(other)
        return QuadSurd(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadSurd(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return QuadSurd(self.a * o.a + self.b * o.b * self.d,
                        self.a * o.b + self.b * o.a, self.d)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadSurd":
        return QuadSurd(self.a, -self.b, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        norm = o.a * o.a - o.b * o.b * self.d
        if norm == 0:
            raise ZeroDivisionError("division by zero surd")
        p = self * o.conjugate()
        return QuadSurd(p.a / norm, p.b / norm, self.d)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return 1 / (self ** (-e))
        out = QuadSurd(Fraction(1), Fraction(0), self.d)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, QuadSurd):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        return self.b == 0 and self.a == other

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def is_rational(self) -> bool:
        return self.b == 0

    def to_fraction(self) -> Fraction:
        if self.b != 0:
            raise ValueError("surd is irrational")
        return self.a

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)


# ---------------------------------------------------------------------------
# exact determinants
# ---------------------------------------------------------------------------

def bareiss_det(matrix: Sequence[Sequence]) -> Fraction:
    """Determinant of a rational matrix by fraction-free elimination.

    Rows are scaled to integers first, so the elimination itself only does
    exact integer division.
    """
    n = len(matrix)
    if n == 0:
        return Fraction(1)
    scale = Fraction(1)
    rows = []
    for row in matrix:
        if len(row) != n:
            raise ValueError("matrix must be square")
        fr = [Fraction(x) for x in row]
        lcm = 1
        for x in fr:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
        rows.append([int(x * lcm) for x in fr])
        scale /= lcm
    sign = 1
    prev = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            for i in range(k + 1, n):
                if rows[i][k] != 0:
                    rows[k], rows[i] = rows[i], rows[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        pivot = rows[k][k]
        for i in range(k + 1, n):
            ri, rk = rows[i], rows[k]
            rik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * pivot - rik * rk[j]) // prev
            ri[k] = 0
        prev = pivot
    return sign * rows[n - 1][n - 1] * scale


def mp_det(matrix, prec: int | None = None):
    """Determinant of an mpf matrix at the given precision (LU with pivoting)."""
    with mpmath.workprec(prec or mpmath.mp.prec):
        return mpmath.det(mpmath.matrix(matrix))
