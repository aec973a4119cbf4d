"""Determinant route to the partition function.

phi(t) = sinh(2 gamma) / (sinh(t - gamma) sinh(t + gamma)) is handled as a
rational function of z = e^{2t}; its t-derivatives are produced symbolically
and independently from the series phi^(k) = 2 (-2)^k [Li_{-k}(q) - Li_{-k}(s)].
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath

from .lattice import ModelParams
from .scalar import (ConsistencyError, DomainError, Polynomial, PrecisionError, RationalFunction,
                     bareiss_det, mp_det, negorder_polylog, rf_t_derivative)


def phi_rf(G: Fraction) -> RationalFunction:
    """phi as a function of z = e^{2t}: 2(G^2 - G^-2) z / (z^2 - (G^2 + G^-2) z + 1)."""
    G = Fraction(G)
    g2, gm2 = G ** 2, G ** -2
    return RationalFunction.with_power_den(Polynomial((0, 2 * (g2 - gm2))),
                                           Polynomial((1, -(g2 + gm2), 1)), 1)


@lru_cache(maxsize=64)
def phi_rf_derivatives(G: Fraction, K: int) -> tuple[RationalFunction, ...]:
    """phi, phi', ..., phi^(K) as rational functions of z (denominators B^(k+1))."""
    if K == 0:
        return (phi_rf(G),)
    prev = phi_rf_derivatives(G, K - 1)
    return prev + (rf_t_derivative(prev[-1]),)


def phi_series_derivative(k: int, q, s):
    """phi^(k)(t) from the Laplace-series closed form, with q = e^{-2(t-gamma)}, s = e^{-2(t+gamma)}."""
    return 2 * (-2) ** k * (negorder_polylog(k, q) - negorder_polylog(k, s))


@dataclass(frozen=True)
class PhiBundle:
    varphi: Fraction
    phi_rf: RationalFunction
    derivs: tuple[Fraction, ...]


def phi_derivatives(p: ModelParams, K: int) -> PhiBundle:
    """phi^(k)(t), k = 0..K, cross-checked between the symbolic and series routes."""
    if K < 0:
        raise DomainError("K must be nonnegative")
    z = p.T ** 2
    rfs = phi_rf_derivatives(p.G, K)
    derivs = []
    for k, F in enumerate(rfs):
        symbolic = F(z)
        series = phi_series_derivative(k, p.q, p.s)
        if symbolic != series:
            raise ConsistencyError(f"phi^({k}) disagrees: {symbolic} vs {series}")
        derivs.append(symbolic)
    return PhiBundle(p.varphi, rfs[0], tuple(derivs))


def _vandermonde_rows(m: int, n: int) -> list[list[int]]:
    return [[(-2 * j) ** k for k in range(n)] for j in range(1, m + 1)]


def tau_matrix(n: int, m: int, derivs: Sequence) -> list[list]:
    rows = _vandermonde_rows(m, n)
    rows += [[derivs[i + k] for k in range(n)] for i in range(n - m)]
    return rows


def tau(n: int, m: int, p: ModelParams) -> Fraction:
    """Mixed Vandermonde/Hankel determinant tau_{n-m,n}."""
    if not (0 <= m < n):
        raise DomainError(f"need 0 <= m < n, got n={n}, m={m}")
    bundle = phi_derivatives(p, 2 * n - m - 2)
    return bareiss_det(tau_matrix(n, m, bundle.derivs))


def superfactorial(n: int) -> int:
    """prod_{j=0}^{n-1} j!"""
    out = 1
    for j in range(n):
        out *= math.factorial(j)
    return out


def Z_det(n: int, m: int, p: ModelParams) -> Fraction:
    if not (0 <= m < n):
        raise DomainError(f"need 0 <= m < n, got n={n}, m={m}")
    sign = -1 if (m * (m + 1) // 2 - n * m) % 2 else 1
    num = sign * p.varphi ** (n * (n - m)) * p.T ** (m * (n - m))
    den = 2 ** (m * (m - 1) // 2) * superfactorial(n - m) * superfactorial(n)
    return num / den * tau(n, m, p)


# ---------------------------------------------------------------------------
# inhomogeneous formulas
# ---------------------------------------------------------------------------

def _sinh_diff(Lj, Lk):
    return (Lj / Lk - Lk / Lj) / 2


def _varphi_at(L, G):
    return (L / G - G / L) * (L * G - 1 / (L * G)) / 4


def Z_det_inhomogeneous(L: Sequence, m: int, n: int, G) -> object:
    """Row-inhomogeneous pDWBC partition function.

    ``L`` holds e^{lambda_j} for j = m+1..n (top row first); entries may be
    Fractions (exact) or mpf (evaluated at the ambient mpmath precision).
    """
    if not (0 <= m < n):
        raise DomainError(f"need 0 <= m < n, got n={n}, m={m}")
    L = list(L)
    if len(L) != n - m:
        raise ValueError(f"need {n - m} spectral parameters, got {len(L)}")
    G = Fraction(G)
    for i in range(len(L)):
        for k in range(i + 1, len(L)):
            if L[i] == L[k]:
                raise ZeroDivisionError("coincident spectral parameters; perturb them")
    rfs = phi_rf_derivatives(G, n - 1)
    exact = all(isinstance(x, (int, Fraction)) for x in L)
    if not exact:
        L = [x if isinstance(x, mpmath.mpf) else mpmath.mpf(Fraction(x).numerator) / Fraction(x).denominator
             for x in L]
    matrix = _vandermonde_rows(m, n)
    for Lj in L:
        z = Lj * Lj
        matrix.append([F(z) for F in rfs])
    det = bareiss_det(matrix) if exact else mp_det(matrix)

    Gv = G if exact else mpmath.mpf(G.numerator) / G.denominator
    num = -1 if (n * (n - 1) // 2) % 2 else 1
    for Lj in L:
        num = num * Lj ** m * _varphi_at(Lj, Gv) ** n
    den = 2 ** (m * (m - 1) // 2) * superfactorial(n)
    for i in range(len(L)):
        for k in range(i + 1, len(L)):
            den = den * _sinh_diff(L[i], L[k])
    return num / den * det


def f_r(r: int, G) -> Fraction:
    """(G^{2(r+1)} - G^{-2(r+1)}) / (G^2 - G^{-2}); equals 1 at r = 0."""
    G = Fraction(G)
    return (G ** (2 * (r + 1)) - G ** (-2 * (r + 1))) / (G ** 2 - G ** -2)


def _lemma_ratio(m, n, G, lam, others):
    L1 = mpmath.exp(lam)
    c = (G ** 2 - G ** -2) / 2
    c = mpmath.mpf(c.numerator) / c.denominator
    big = Z_det_inhomogeneous([L1] + list(others), m, n, G)
    small = Z_det_inhomogeneous(list(others), m + 1, n, G) if others else mpmath.mpf(1)
    fm = f_r(m, G)
    scale = mpmath.mpf(2) ** (n - 1) / (c * fm.numerator) * fm.denominator
    return scale * mpmath.exp(-(n - 1) * lam) * big / small


def limit_lemma_check(m: int, n: int, p: ModelParams, lam, others: Sequence | None = None,
                      prec: int = 256):
    """Residual |2^{n-1}/(c f_m) e^{-(n-1) lam} Z_{n-m,n} / Z_{n-m-1,n} - 1|.

    The top row carries e^lam; the remaining n-m-1 rows use ``others``
    (rationals, default T+1, T+2, ...).  Raises PrecisionError when the value
    shifts between ``prec`` and ``prec + 64`` bits.
    """
    if not (0 <= m < n):
        raise DomainError(f"need 0 <= m < n, got n={n}, m={m}")
    if others is None:
        others = [p.T + j for j in range(1, n - m)]
    others = [Fraction(x) for x in others]
    if len(others) != n - m - 1:
        raise ValueError(f"need {n - m - 1} fixed spectral parameters")
    G = p.G
    vals = []
    for P in (prec, prec + 64):
        with mpmath.workprec(P):
            vals.append(abs(_lemma_ratio(m, n, G, mpmath.mpf(lam), others) - 1))
    with mpmath.workprec(prec + 64):
        hi = vals[1]
        err = abs(vals[0] - hi)
        floor = mpmath.mpf(2) ** (-prec // 2)
        if err > max(hi, floor) * mpmath.mpf(2) ** (-prec // 4):
            raise PrecisionError("limit residual unstable under precision change", 2 * prec)
    with mpmath.workprec(prec):
        return +vals[0]
