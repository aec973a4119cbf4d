"""Discrete orthogonal polynomials on {0, 1, 2, ...} for the pDWBC weight

    w(x) = [q^{x+m+1} - s^{x+m+1}] (x+1)(x+2)...(x+m),

and its Meixner approximation w^M(x) = q^{x+m+1} (x+1)...(x+m).
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

try:  # optional accelerator for large exact rationals
    import gmpy2
except ImportError:  # pragma: no cover
    gmpy2 = None

from .lattice import ModelParams
from .scalar import (ConsistencyError, DomainError, Polynomial, PrecisionError, poly_geometric_sum, to_mpf)


def rising_poly(m: int) -> Polynomial:
    """(x+1)(x+2)...(x+m) = (x+m)!/x!"""
    return Polynomial.from_roots([-k for k in range(1, m + 1)])


def weight_w(x: int, p: ModelParams, m: int) -> Fraction:
    e = x + m + 1
    return (p.q ** e - p.s ** e) * rising_poly(m)(x)


def weight_wM(x: int, p: ModelParams, m: int) -> Fraction:
    return p.q ** (x + m + 1) * rising_poly(m)(x)


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MomentTable:
    m: int
    mu: tuple
    meixner: bool = False


def moments_from_ratios(q, s, m: int, jmax: int) -> tuple:
    """mu_j = sum_x x^j (x+1)..(x+m) [q^{x+m+1} - s^{x+m+1}], j = 0..jmax.

    ``s=None`` drops the second term (Meixner weight).  Works for Fraction or mpf ratios.
    """
    P = rising_poly(m)
    xj = Polynomial((1,))
    out = []
    for _ in range(jmax + 1):
        Q = xj * P
        val = q ** (m + 1) * poly_geometric_sum(Q, q)
        if s is not None:
            val = val - s ** (m + 1) * poly_geometric_sum(Q, s)
        out.append(val)
        xj = xj * Polynomial((0, 1))
    return tuple(out)


class _MomentCache:
    """Moment sequences per (T, G, m, kind); extended on demand."""

    def __init__(self):
        self._data: dict = {}
        self._lock = threading.Lock()

    def get(self, p: ModelParams, m: int, jmax: int, meixner: bool) -> tuple:
        key = (p.T, p.G, m, meixner)
        cached = self._data.get(key)
        if cached is not None and len(cached) > jmax:
            return cached[: jmax + 1]
        with self._lock:
            cached = self._data.get(key)
            if cached is None or len(cached) <= jmax:
                cached = moments_from_ratios(p.q, None if meixner else p.s, m, jmax)
                self._data[key] = cached
        return cached[: jmax + 1]


_CACHE = _MomentCache()


def moments(p: ModelParams, m: int, jmax: int, meixner: bool = False) -> MomentTable:
    if jmax < 0 or m < 0:
        raise DomainError("need jmax >= 0 and m >= 0")
    return MomentTable(m, _CACHE.get(p, m, jmax, meixner), meixner)


def h0_closed_form(p: ModelParams, m: int) -> Fraction:
    """m! [q^{m+1}/(1-q)^{m+1} - s^{m+1}/(1-s)^{m+1}]"""
    q, s = p.q, p.s
    return math.factorial(m) * (q ** (m + 1) / (1 - q) ** (m + 1) - s ** (m + 1) / (1 - s) ** (m + 1))


# ---------------------------------------------------------------------------
# Hankel determinants and the recurrence
# ---------------------------------------------------------------------------

def hankel_minors(mu: Sequence[Fraction], K: int) -> list[Fraction]:
    """Leading principal minors Delta_0 = 1, Delta_1, ..., Delta_K of (mu_{i+j}).

    One fraction-free elimination pass: after step k the pivot equals the
    (k+1)-th leading minor of the integer-scaled matrix.
    """
    if len(mu) < 2 * K - 1:
        raise ValueError("not enough moments")
    if K == 0:
        return [Fraction(1)]
    lcm = 1
    for x in mu[: 2 * K - 1]:
        d = Fraction(x).denominator
        lcm = lcm * d // math.gcd(lcm, d)
    A = [[int(Fraction(mu[i + j]) * lcm) for j in range(K)] for i in range(K)]
    minors = [Fraction(1)]
    prev = 1
    for k in range(K):
        pivot = A[k][k]
        minors.append(Fraction(pivot, lcm ** (k + 1)))
        if pivot == 0:
            raise ConsistencyError(f"singular Hankel minor of order {k + 1}")
        for i in range(k + 1, K):
            rik = A[i][k]
            Ai, Ak = A[i], A[k]
            for j in range(k + 1, K):
                Ai[j] = (Ai[j] * pivot - rik * Ak[j]) // prev
        prev = pivot
    return minors


def chebyshev_recurrence(mu: Sequence, K: int) -> tuple[list, list, list]:
    """Chebyshev algorithm on ordinary moments: (alpha_k, beta_k, sigma_kk) for k < K.

    beta_0 = mu_0; sigma_kk equals the squared norm h_k.  Needs mu_0..mu_{2K-1}.
    """
    if len(mu) < 2 * K:
        raise ValueError("not enough moments")
    if gmpy2 is not None and all(isinstance(x, Fraction) for x in mu[: 2 * K]):
        fast = [gmpy2.mpq(x.numerator, x.denominator) for x in mu[: 2 * K]]
        return tuple([_from_mpq(v) for v in seq] for seq in _chebyshev(fast, K))
    return _chebyshev(mu, K)


def _from_mpq(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


def _chebyshev(mu, K):
    alpha, beta, norms = [], [], []
    sig_prev = [0] * (2 * K)
    sig = list(mu[: 2 * K])
    alpha.append(mu[1] / mu[0] if K > 0 else None)
    beta.append(mu[0])
    norms.append(mu[0])
    for k in range(1, K):
        new = [0] * (2 * K)
        for l in range(k, 2 * K - k):
            new[l] = sig[l + 1] - alpha[k - 1] * sig[l] - beta[k - 1] * sig_prev[l]
        alpha.append(new[k + 1] / new[k] - sig[k] / sig[k - 1])
        beta.append(new[k] / sig[k - 1])
        norms.append(new[k])
        sig_prev, sig = sig, new
    return alpha, beta, norms


@dataclass(frozen=True)
class OPSystem:
    m: int
    norms: tuple
    alpha: tuple
    beta: tuple
    polys: tuple = field(repr=False)
    minors: tuple = field(repr=False, default=())


def op_system(mt: MomentTable, K: int) -> OPSystem:
    """Monic p_0..p_K, norms h_0..h_K and recurrence coefficients, exactly.

    Norms come from Hankel minor ratios; the Chebyshev recurrence recomputes
    them independently and any disagreement raises ConsistencyError.
    """
    mu = mt.mu
    if len(mu) < 2 * K + 2:
        raise ValueError(f"need {2 * K + 2} moments, have {len(mu)}")
    minors = hankel_minors(mu, K + 1)
    for k, d in enumerate(minors):
        if d <= 0:
            raise ConsistencyError(f"Hankel minor Delta_{k} = {d} is not positive")
    norms = tuple(minors[k + 1] / minors[k] for k in range(K + 1))
    alpha, beta, sig = chebyshev_recurrence(mu, K + 1)
    if tuple(sig) != norms:
        raise ConsistencyError("Hankel and recurrence norms disagree")
    x = Polynomial((0, 1))
    polys = [Polynomial((1,))]
    if K >= 1:
        polys.append(x - alpha[0])
    for k in range(1, K):
        polys.append((x - alpha[k]) * polys[k] - polys[k - 1] * beta[k])
    return OPSystem(mt.m, norms, tuple(alpha), tuple(beta), tuple(polys), tuple(minors))


def monic_by_solve(mu: Sequence[Fraction], k: int) -> Polynomial:
    """Monic p_k from sum_j c_j mu_{i+j} = -mu_{i+k}, i < k (Gaussian elimination)."""
    A = [[Fraction(mu[i + j]) for j in range(k)] + [-Fraction(mu[i + k])] for i in range(k)]
    for col in range(k):
        piv = next(r for r in range(col, k) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        for r in range(k):
            if r != col and A[r][col] != 0:
                f = A[r][col] / A[col][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    coeffs = [A[i][k] / A[i][i] for i in range(k)] + [Fraction(1)]
    return Polynomial(tuple(coeffs))


def moment_pairing(P: Polynomial, Q: Polynomial, mu: Sequence) -> Fraction:
    """sum_x P(x) Q(x) w(x), contracted through the moment sequence."""
    R = P * Q
    if R.degree >= len(mu):
        raise ValueError("not enough moments for this pairing")
    return sum((c * mu[i] for i, c in enumerate(R.coeffs)), Fraction(0))


def orthogonality_residuals(ops: OPSystem, mu: Sequence, K: int) -> list[list[Fraction]]:
    """Matrix of <p_j, p_k> - h_k delta_jk, all exact."""
    out = []
    for j in range(K + 1):
        row = []
        for k in range(K + 1):
            val = moment_pairing(ops.polys[j], ops.polys[k], mu)
            row.append(val - (ops.norms[k] if j == k else 0))
        out.append(row)
    return out


# ---------------------------------------------------------------------------
# Meixner system
# ---------------------------------------------------------------------------

def meixner_h(k: int, m: int, q: Fraction) -> Fraction:
    """k!(k+m)! q^{k+m+1} / (1-q)^{2k+m+1}"""
    if not (0 < q < 1):
        raise DomainError("need 0 < q < 1")
    return (math.factorial(k) * math.factorial(k + m) * Fraction(q) ** (k + m + 1)
            / (1 - Fraction(q)) ** (2 * k + m + 1))


def _poch(beta, j: int):
    out = 1
    for i in range(j):
        out *= beta + i
    return out


def meixner_M(k: int, m: int, q: Fraction) -> Polynomial:
    """M_k(z; m+1, q) = 2F1(-k, -z; m+1; 1 - 1/q) as a polynomial in z."""
    beta = m + 1
    u = 1 - 1 / Fraction(q)
    out = Polynomial()
    falling_z = Polynomial((1,))
    for j in range(k + 1):
        coef = u ** j * math.perm(k, j) / (_poch(beta, j) * math.factorial(j))
        out = out + falling_z * coef
        falling_z = falling_z * Polynomial((-j, 1))
    return out


def meixner_monic(k: int, m: int, q: Fraction) -> Polynomial:
    u = 1 - 1 / Fraction(q)
    return meixner_M(k, m, q) * (Fraction(_poch(m + 1, k)) / u ** k)


# ---------------------------------------------------------------------------
# partition function and comparisons
# ---------------------------------------------------------------------------

def norms(p: ModelParams, m: int, K: int, meixner: bool = False) -> tuple[Fraction, ...]:
    """h_0..h_{K-1} for the pDWBC (or Meixner) weight."""
    if K == 0:
        return ()
    mt = moments(p, m, 2 * K - 1, meixner)
    minors = hankel_minors(mt.mu, K)
    return tuple(minors[k + 1] / minors[k] for k in range(K))


def Z_op(n: int, m: int, p: ModelParams) -> Fraction:
    """(2ab)^{n(n-m)} T^{m(n-m)} prod_{j<n-m} h_j / (j! (j+m)!)"""
    if not (0 <= m < n):
        raise DomainError(f"need 0 <= m < n, got n={n}, m={m}")
    out = (2 * p.a * p.b) ** (n * (n - m)) * p.T ** (m * (n - m))
    for j, h in enumerate(norms(p, m, n - m)):
        out *= h / (math.factorial(j) * math.factorial(j + m))
    return out


@dataclass(frozen=True)
class RatioReport:
    k: int
    m: int
    ratio: Fraction
    lhs: mpmath.mpf
    rhs: mpmath.mpf
    r_k: mpmath.mpf
    bound_ok: bool


def ratio_report(k: int, m: int, p: ModelParams, prec: int = 256) -> RatioReport:
    """h_k/h^M_k and the bound |sqrt(h/hM) - sqrt(hM/h)| <= G^{-4(m+1)}/sqrt(1 - G^{-4(m+1)})."""
    h = norms(p, m, k + 1)[k]
    ratio = h / meixner_h(k, m, p.q)
    e = p.G ** (-4 * (m + 1))
    with mpmath.workprec(prec):
        r = to_mpf(ratio)
        lhs = abs(mpmath.sqrt(r) - 1 / mpmath.sqrt(r))
        rhs = to_mpf(e) / mpmath.sqrt(to_mpf(1 - e))
        return RatioReport(k, m, ratio, lhs, rhs, mpmath.log(r), bool(lhs <= rhs))


@dataclass(frozen=True)
class IPCheck:
    identity: str
    k: int
    m: int
    target: Fraction
    truncated: Fraction
    residual: Fraction
    tail_bound: Fraction
    status: str


def ip_identity_check(k: int, m: int, p: ModelParams, Xmax: int, identity: str = "IP21",
                      threshold: Fraction = Fraction(1, 10 ** 30)) -> IPCheck:
    """Compare an exact norm identity with its sum truncated at l = Xmax.

    IP21: h_k - h^M_k = sum p_k p^M_k (w - w^M)
    IP23: h_k         = sum p_k p^M_k w
    IP24: h^M_k       = sum p_k p^M_k w^M

    The tail beyond Xmax is bounded in closed form using the absolute
    coefficients of p_k p^M_k.  Status is "inconclusive" when that bound
    exceeds ``threshold`` times the target.
    """
    mt = moments(p, m, 2 * k + 1)
    pk = op_system(mt, k).polys[k]
    pM = meixner_monic(k, m, p.q)
    hk = op_system(mt, k).norms[k]
    hM = meixner_h(k, m, p.q)
    R = pk * pM
    P = rising_poly(m)
    q, s = p.q, p.s

    if identity == "IP21":
        target = hk - hM
        term = lambda l: -R(l) * P(l) * s ** (l + m + 1)  # noqa: E731
        tail = s ** (m + 1) * poly_geometric_sum(R.abs_coeffs() * P, s, Xmax + 1)
    elif identity == "IP23":
        target = hk
        term = lambda l: R(l) * P(l) * (q ** (l + m + 1) - s ** (l + m + 1))  # noqa: E731
        tail = q ** (m + 1) * poly_geometric_sum(R.abs_coeffs() * P, q, Xmax + 1)
    elif identity == "IP24":
        target = hM
        term = lambda l: R(l) * P(l) * q ** (l + m + 1)  # noqa: E731
        tail = q ** (m + 1) * poly_geometric_sum(R.abs_coeffs() * P, q, Xmax + 1)
    else:
        raise ValueError(f"unknown identity {identity!r}")

    truncated = sum((term(l) for l in range(Xmax + 1)), Fraction(0))
    residual = abs(target - truncated)
    if residual > tail:
        status = "fail"
    elif tail > threshold * abs(target):
        status = "inconclusive"
    else:
        status = "pass"
    return IPCheck(identity, k, m, target, truncated, residual, tail, status)


# ---------------------------------------------------------------------------
# zeros
# ---------------------------------------------------------------------------

def jacobi_coefficients(p: ModelParams, m: int, K: int) -> tuple[list, list]:
    """Exact alpha_0..alpha_{K-1}, beta_0..beta_{K-1}."""
    mt = moments(p, m, 2 * K - 1)
    alpha, beta, _ = chebyshev_recurrence(mt.mu, K)
    return alpha, beta


def zeros_from_recurrence(alpha: Sequence, beta: Sequence, k: int, prec: int = 128) -> list:
    """Eigenvalues of the k x k Jacobi matrix, ascending."""
    if k < 1:
        raise DomainError("k must be >= 1")
    with mpmath.workprec(prec):
        J = mpmath.zeros(k, k)
        for i in range(k):
            J[i, i] = to_mpf(alpha[i], prec)
            if i + 1 < k:
                off = mpmath.sqrt(to_mpf(beta[i + 1], prec))
                J[i, i + 1] = off
                J[i + 1, i] = off
        try:
            ev = mpmath.eigsy(J, eigvals_only=True)
        except Exception as exc:  # mpmath signals non-convergence with plain exceptions
            raise PrecisionError(f"tridiagonal eigensolver failed: {exc}", 2 * prec) from exc
        return sorted(ev[i] for i in range(k))


def op_zeros(k: int, m: int, p: ModelParams, prec: int = 128) -> list:
    alpha, beta = jacobi_coefficients(p, m, k)
    return zeros_from_recurrence(alpha, beta, k, prec)


def gershgorin_bound(alpha: Sequence, beta: Sequence, k: int, prec: int = 128):
    """Upper bound on the largest eigenvalue of the k x k Jacobi matrix."""
    with mpmath.workprec(prec):
        best = None
        for i in range(k):
            r = to_mpf(alpha[i], prec)
            if i > 0:
                r += mpmath.sqrt(to_mpf(beta[i], prec))
            if i + 1 < k:
                r += mpmath.sqrt(to_mpf(beta[i + 1], prec))
            best = r if best is None or r > best else best
        return best


def strictly_interlace(inner: Sequence, outer: Sequence) -> bool:
    """outer_0 < inner_0 < outer_1 < ... < inner_{k-1} < outer_k."""
    if len(outer) != len(inner) + 1:
        return False
    return all(outer[i] < inner[i] < outer[i + 1] for i in range(len(inner)))
