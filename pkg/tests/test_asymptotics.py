from fractions import Fraction

import mpmath
import pytest

from pdwbc import asymptotics as asy
from pdwbc.lattice import ModelParams, ground_state, config_weight
from pdwbc.orthopoly import Z_op
from pdwbc.scalar import PrecisionError

P = ModelParams(Fraction(2), Fraction(5, 4))
P2 = ModelParams(Fraction(3), Fraction(6, 5))

# Regression values frozen from the first run of this implementation.
FROZEN_XI_12_6 = mpmath.mpf("8.98145000079993e-5")
FROZEN_TODA_6_2 = mpmath.mpf("2.4631471376559e-6")


def test_Z_meixner_examples():
    assert asy.Z_meixner(1, 0, P) == Fraction(21, 32) == P.b * P.G / P.T
    assert asy.Z_meixner(1, 0, P) == 2 * P.a * P.b * P.q / (1 - P.q)
    assert asy.Z_meixner(2, 1, P) == P.b ** 2 * P.G * (P.G / P.T)


@pytest.mark.parametrize("p", [P, P2])
def test_Z_meixner_closed_vs_product(p):
    for n in range(1, 11):
        for m in range(n):
            assert asy.Z_meixner(n, m, p) == asy.Z_meixner_product(n, m, p)


def test_Z_meixner_ratio_is_monomial():
    r = asy.Z_meixner(6, 2, P) / asy.Z_meixner(6, 3, P)
    # n(n-m) drops by 6, m(n-m) goes 8 -> 9, n-m drops by 1
    assert r == P.b ** 6 * P.G ** -1 * (P.G / P.T)


def test_C_of_m():
    assert asy.C_of_m(0, P) == Fraction(369, 625)
    vals = [asy.C_of_m(m, P) for m in range(10)]
    assert all(0 < v < 1 for v in vals)
    assert all(a < b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("m", [0, 1, 2])
def test_partial_products_approach_C(m):
    K = 12
    gap = abs(asy.norm_ratio_partial_product(m, P, K) - asy.C_of_m(m, P))
    assert gap < 10 * P.G ** (-2 * m)
    assert asy.norm_ratio_partial_product(m, P, K, via_recurrence=True) == asy.norm_ratio_partial_product(m, P, K)


@pytest.mark.parametrize("p", [P, P2, ModelParams(Fraction(30), Fraction(5, 4))])
@pytest.mark.parametrize("m", [0, 1, 3])
def test_partial_products_converge_to_euler_type_product(p, m):
    # The products settle on prod_{j>m}(1 - G^{-4j}) for every t, not on C(m) alone.
    with mpmath.workprec(256):
        prods = [asy.norm_ratio_partial_product(m, p, K, via_recurrence=True) for K in (10, 20, 40)]
        lim = asy.norm_ratio_limit(m, p)
        gaps = [abs(mpmath.mpf(x.numerator) / x.denominator - lim) for x in prods]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < mpmath.mpf("1e-4") * lim
        C = asy.C_of_m(m, p)
        assert abs(lim - mpmath.mpf(C.numerator) / C.denominator) > 100 * gaps[2]


def test_euler_product_first_factor_is_C():
    with mpmath.workprec(256):
        for m in range(4):
            C = asy.C_of_m(m, P)
            rest = asy.norm_ratio_limit(m, P) / (mpmath.mpf(C.numerator) / C.denominator)
            assert abs(rest - asy.norm_ratio_limit(m + 1, P)) < mpmath.mpf(10) ** -60


def test_theorem_check_decay():
    xs = [abs(asy.theorem_check(2 * j, j, P).xi_nm) for j in range(3, 8)]
    assert all(a > b for a, b in zip(xs, xs[1:]))
    assert abs(asy.theorem_check(14, 7, P).xi_nm) < abs(asy.theorem_check(8, 4, P).xi_nm)
    rep = asy.theorem_check(12, 6, P)
    assert abs(rep.xi_nm) < mpmath.mpf("1e-3")
    assert abs(rep.xi_nm - FROZEN_XI_12_6) < mpmath.mpf("1e-15")
    assert 1 + rep.xi_nm > 0
    assert rep.Z_meixner > 0 and 0 < rep.C_m < 1


def test_theorem_report_fields():
    rep = asy.theorem_check(6, 2, P, eps=Fraction(1, 2))
    with mpmath.workprec(256):
        xe = rep.xi_exact
        assert abs(rep.xi_nm - mpmath.mpf(xe.numerator) / xe.denominator) < mpmath.mpf(10) ** -60
    assert rep.bound_envelope == asy.envelope(6, 2, P, Fraction(1, 2))


def test_free_energy():
    with mpmath.workprec(256):
        assert asy.free_energy(1, P) == mpmath.log(mpmath.mpf(21) / 20)
    gap = abs(asy.finite_size_free_energy(12, 6, P) - asy.free_energy(Fraction(1, 2), P))
    assert gap < mpmath.mpf("0.05")


@pytest.mark.parametrize("n,m", [(1, 0), (2, 1), (4, 1), (5, 2), (7, 3)])
def test_ground_state_decomposition(n, m):
    lhs, rhs = asy.ground_state_decomposition(n, m, P)
    assert lhs == rhs
    xi = asy.theorem_check(n, m, P).xi_exact
    assert lhs == asy.C_of_m(m, P) * (1 + xi)


def test_ground_state_ratio_n2_m1():
    Z = Z_op(2, 1, P)
    wgs = config_weight(ground_state(2, 1), P.weights())
    pref = asy.ground_state_ratio(2, 1, P)
    assert pref == (P.G ** 2 - P.T ** -2) / (P.G ** 2 - P.G ** -2)
    xi = asy.theorem_check(2, 1, P).xi_exact
    assert Z / wgs == pref * asy.C_of_m(1, P) * (1 + xi)


def test_toda_order_and_regression():
    res = asy.toda_check(6, 2, P, "1e-4", 256)
    assert mpmath.mpf(1) / 8 <= res.order_ratio <= mpmath.mpf(1) / 2
    assert abs(res.residual / FROZEN_TODA_6_2 - 1) < mpmath.mpf("1e-6")


def test_toda_m0():
    res = asy.toda_check(3, 0, P)
    assert mpmath.mpf(1) / 8 <= res.order_ratio <= mpmath.mpf(1) / 2


def test_toda_precision_guard():
    with pytest.raises(PrecisionError) as exc:
        asy.toda_residual(4, 1, P, "1e-30", 128)
    assert exc.value.suggested_precision > 128


def test_phase_diagnostic():
    xc = asy.xi_critical(P)
    assert xc == Fraction(39, 25)
    lo = asy.phase_diagnostic(30, Fraction(3, 10) * xc, P)
    hi = asy.phase_diagnostic(30, 3 * xc, P)
    assert lo.saturation_fraction > hi.saturation_fraction
    for d in (lo, hi):
        assert all(z > 0 for z in d.zeros)
        assert all(g > 0 for g in d.zero_gaps)
        # discrete orthogonal polynomials have at most one zero per unit interval
        assert all(g > 1 for g in d.zero_gaps)
