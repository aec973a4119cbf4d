"""Large-n quantities for the ferroelectric pDWBC model and their desk-scale checks."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .lattice import ModelParams, ground_state_weight
from .orthopoly import (Z_op, chebyshev_recurrence, meixner_h, moments, moments_from_ratios, norms,
                        op_zeros)
from .scalar import DEFAULT_PRECISION, DomainError, PrecisionError, to_mpf


def Z_meixner(n: int, m: int, p: ModelParams) -> Fraction:
    """b^{n(n-m)} G^{m(n-m)} (G/T)^{n-m}"""
    if not (0 <= m < n):
        raise DomainError(f"need 0 <= m < n, got n={n}, m={m}")
    N = n - m
    return p.b ** (n * N) * p.G ** (m * N) * (p.G / p.T) ** N


def Z_meixner_product(n: int, m: int, p: ModelParams) -> Fraction:
    """Same quantity assembled from the Meixner norms h^M_j."""
    if not (0 <= m < n):
        raise DomainError(f"need 0 <= m < n, got n={n}, m={m}")
    out = (2 * p.a * p.b) ** (n * (n - m)) * p.T ** (m * (n - m))
    for j in range(n - m):
        out *= meixner_h(j, m, p.q) / (math.factorial(j) * math.factorial(j + m))
    return out


def C_of_m(m: int, p: ModelParams) -> Fraction:
    if m < 0:
        raise DomainError("m must be nonnegative")
    return 1 - p.G ** (-4 * (m + 1))


def norm_ratio_limit(m: int, p: ModelParams, prec: int = DEFAULT_PRECISION):
    """prod_{j>m} (1 - G^{-4j}), the n -> infinity limit of Z / Z^M observed numerically.

    Its first factor is C(m); the remaining factors are 1 - O(G^{-4(m+2)}).
    """
    if m < 0:
        raise DomainError("m must be nonnegative")
    with mpmath.workprec(prec):
        x = to_mpf(p.G ** -4)
        return mpmath.qp(x ** (m + 1), x)


def norm_ratio_partial_product(m: int, p: ModelParams, K: int, via_recurrence: bool = False) -> Fraction:
    """prod_{k<=K} h_k / h^M_k

    ``via_recurrence`` takes the norms from the Chebyshev recurrence instead
    of Hankel minors; both are exact and much cheaper this way for large K.
    """
    if via_recurrence:
        hs = chebyshev_recurrence(moments(p, m, 2 * K + 1).mu, K + 1)[2]
    else:
        hs = norms(p, m, K + 1)
    out = Fraction(1)
    for k, h in enumerate(hs):
        out *= h / meixner_h(k, m, p.q)
    return out


@dataclass(frozen=True)
class AsymptoticsReport:
    n: int
    m: int
    Z_exact: Fraction
    Z_meixner: Fraction
    C_m: Fraction
    xi_nm: mpmath.mpf
    bound_envelope: mpmath.mpf
    passed: bool

    @property
    def xi_exact(self) -> Fraction:
        return self.Z_exact / (self.C_m * self.Z_meixner) - 1


def envelope(n: int, m: int, p: ModelParams, eps=0.5, prec: int = DEFAULT_PRECISION):
    """rho^m exp(-n^{1-eps}) with rho = G^{-2}."""
    with mpmath.workprec(prec):
        rho = to_mpf(p.G ** -2)
        e = to_mpf(eps) if isinstance(eps, Fraction) else mpmath.mpf(eps)
        return rho ** m * mpmath.exp(-mpmath.mpf(n) ** (1 - e))


def theorem_check(n: int, m: int, p: ModelParams, eps=0.5, multiple=1,
                  prec: int = DEFAULT_PRECISION) -> AsymptoticsReport:
    """xi_nm = Z / (C(m) Z^M) - 1 from the exact orthogonal-polynomial route.

    ``passed`` records whether |xi| <= multiple * envelope; the implied
    constant of the asymptotic bound is unknown, so this is only a report.
    """
    Z = Z_op(n, m, p)
    ZM = Z_meixner(n, m, p)
    C = C_of_m(m, p)
    with mpmath.workprec(prec):
        xi = to_mpf(Z / (C * ZM) - 1)
        env = envelope(n, m, p, eps, prec)
        ok = bool(abs(xi) <= multiple * env)
    return AsymptoticsReport(n, m, Z, ZM, C, xi, env, ok)


def free_energy(r, p: ModelParams, prec: int = DEFAULT_PRECISION):
    """ln b + (1 - r) ln G, with r = (n-m)/n in (0, 1]."""
    r = Fraction(r)
    if not (0 < r <= 1):
        raise DomainError("r must lie in (0, 1]")
    with mpmath.workprec(prec):
        return mpmath.log(to_mpf(p.b)) + to_mpf(1 - r) * mpmath.log(to_mpf(p.G))


def finite_size_free_energy(n: int, m: int, p: ModelParams, prec: int = DEFAULT_PRECISION):
    """ln Z / (n (n-m))"""
    with mpmath.workprec(prec):
        return mpmath.log(to_mpf(Z_op(n, m, p))) / (n * (n - m))


def ground_state_ratio(n: int, m: int, p: ModelParams) -> Fraction:
    """((G^2 - T^-2) / (G^2 - G^-2))^{n-m}"""
    if not (0 <= m < n):
        raise DomainError(f"need 0 <= m < n, got n={n}, m={m}")
    return ((p.G ** 2 - p.T ** -2) / (p.G ** 2 - p.G ** -2)) ** (n - m)


def ground_state_decomposition(n: int, m: int, p: ModelParams) -> tuple[Fraction, Fraction]:
    """(Z / (w_gs * prefactor), C(m) (1 + xi)); the two agree exactly."""
    Z = Z_op(n, m, p)
    lhs = Z / (ground_state_weight(n, m, p) * ground_state_ratio(n, m, p))
    rhs = Z / Z_meixner(n, m, p)
    return lhs, rhs


# ---------------------------------------------------------------------------
# Toda equation
# ---------------------------------------------------------------------------

def _mp_hankel_norms(mu, K: int):
    """h_0..h_{K-1} from Gaussian elimination pivots of the Hankel matrix."""
    A = [[mu[i + j] for j in range(K)] for i in range(K)]
    out = []
    for k in range(K):
        piv = A[k][k]
        if piv <= 0:
            raise PrecisionError("Hankel pivot lost positivity", 0)
        out.append(piv)
        for i in range(k + 1, K):
            f = A[i][k] / piv
            for j in range(k + 1, K):
                A[i][j] -= f * A[k][j]
    return out


def _log_norm_data(t, gamma, m: int, N: int):
    q = mpmath.exp(-2 * (t - gamma))
    s = mpmath.exp(-2 * (t + gamma))
    mu = moments_from_ratios(q, s, m, 2 * N)
    h = _mp_hankel_norms(mu, N + 1)
    return mpmath.fsum(mpmath.log(x) for x in h[:N]), h


def _toda_residual(n: int, m: int, p: ModelParams, eps, prec: int):
    N = n - m
    with mpmath.workprec(prec):
        t = mpmath.log(to_mpf(p.T))
        gamma = mpmath.log(to_mpf(p.G))
        e = mpmath.mpf(eps)
        lp, _ = _log_norm_data(t + e, gamma, m, N)
        l0, h = _log_norm_data(t, gamma, m, N)
        lm, _ = _log_norm_data(t - e, gamma, m, N)
        second = (lp - 2 * l0 + lm) / e ** 2
        return abs(second - 4 * h[N] / h[N - 1])


@dataclass(frozen=True)
class TodaResult:
    n: int
    m: int
    eps: mpmath.mpf
    residual: mpmath.mpf
    residual_half: mpmath.mpf
    order_ratio: mpmath.mpf


def toda_residual(n: int, m: int, p: ModelParams, eps="1e-4", prec: int = DEFAULT_PRECISION):
    """|central second difference of ln prod_{k<n-m} h_k in t  -  4 h_{n-m}/h_{n-m-1}|.

    The difference quotient cancels about 2 log2(1/eps) bits; the value is
    recomputed with 64 extra bits and a PrecisionError is raised if the two
    disagree beyond a tenth of the residual.
    """
    if not (0 <= m < n):
        raise DomainError(f"need 0 <= m < n, got n={n}, m={m}")
    with mpmath.workprec(prec):
        e = mpmath.mpf(eps)
        lost = int(2 * -mpmath.log(e, 2)) + 16
    if lost >= prec - 32:
        raise PrecisionError("second difference would cancel most of the working precision",
                             2 * lost + 64)
    r1 = _toda_residual(n, m, p, eps, prec)
    r2 = _toda_residual(n, m, p, eps, prec + 64)
    with mpmath.workprec(prec + 64):
        if abs(r1 - r2) > r2 / 10 + mpmath.mpf(2) ** (lost - prec):
            raise PrecisionError("Toda residual unstable under precision change", 2 * prec)
        return +r2


def toda_check(n: int, m: int, p: ModelParams, eps="1e-4", prec: int = DEFAULT_PRECISION) -> TodaResult:
    """Residual at eps and 2 eps; an O(eps^2) error makes their ratio about 1/4."""
    r = toda_residual(n, m, p, eps, prec)
    with mpmath.workprec(prec):
        e = mpmath.mpf(eps)
    r2 = toda_residual(n, m, p, 2 * e, prec)
    with mpmath.workprec(prec):
        return TodaResult(n, m, e, r, r2, r / r2)


# ---------------------------------------------------------------------------
# zero distribution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhaseDiagnostic:
    k: int
    m: int
    xi: Fraction
    xi_c: Fraction
    zeros: tuple
    zero_gaps: tuple
    saturation_fraction: mpmath.mpf


def xi_critical(p: ModelParams) -> Fraction:
    """T^2/G^2 - 1"""
    return p.T ** 2 / p.G ** 2 - 1


def phase_diagnostic(k: int, xi, p: ModelParams, delta="0.05", prec: int = 128) -> PhaseDiagnostic:
    """Zeros of p_k for m = round(k xi) and the fraction of saturated gaps.

    A gap between consecutive zeros counts as saturated when it is at most
    (1 + delta) lattice spacings.  Only the lower half of the gaps (the
    edge nearest the origin, where a saturated region would sit) is scored.
    """
    if k < 2:
        raise DomainError("k must be >= 2")
    xi = Fraction(xi)
    m = round(k * xi)
    zeros = op_zeros(k, m, p, prec)
    with mpmath.workprec(prec):
        gaps = tuple(zeros[i + 1] - zeros[i] for i in range(k - 1))
        lower = gaps[: max(1, len(gaps) // 2)]
        cutoff = 1 + mpmath.mpf(delta)
        frac = mpmath.mpf(sum(1 for g in lower if g <= cutoff)) / len(lower)
    return PhaseDiagnostic(k, m, xi, xi_critical(p), tuple(zeros), gaps, frac)
