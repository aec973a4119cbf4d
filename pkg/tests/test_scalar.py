import os
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from pdwbc.scalar import (DomainError, Polynomial, QuadSurd, RationalFunction, bareiss_det,
                          default_precision, eulerian_polynomial, exact_sqrt, format_rational,
                          mp_det, negorder_polylog, parse_rational, poly_geometric_sum,
                          rf_t_derivative, to_mpf)

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=40)


def partial_sum_with_tail(k, r, X):
    """sum_{x=1}^{X} x^k r^x and a bound on the rest.

    For x > X >= 2k/(1-r) the term ratio ((x+1)/x)^k r is at most (1+r)/2, so
    the tail is at most the first omitted term over 1 - (1+r)/2.
    """
    s = sum(Fraction(x) ** k * r ** x for x in range(1, X + 1))
    first = Fraction(X + 1) ** k * r ** (X + 1)
    return s, first * 2 / (1 - r)


@pytest.mark.parametrize("r", [Fraction(1, 3), Fraction(1, 2), Fraction(25, 64)])
@pytest.mark.parametrize("k", range(0, 13))
def test_polylog_against_partial_sums(k, r):
    s, tail = partial_sum_with_tail(k, r, 500)
    assert 0 <= negorder_polylog(k, r) - s <= tail


def test_polylog_examples():
    assert negorder_polylog(0, Fraction(1, 2)) == 1
    assert negorder_polylog(1, Fraction(1, 2)) == 2
    assert negorder_polylog(2, Fraction(1, 3)) == Fraction(3, 2)


def test_polylog_mpf_matches_mpmath():
    with mpmath.workprec(200):
        for k in range(6):
            ours = negorder_polylog(k, mpmath.mpf(25) / 64)
            assert abs(ours - mpmath.polylog(-k, mpmath.mpf(25) / 64)) < mpmath.mpf(2) ** -180 * abs(ours)


def test_eulerian_numbers():
    # triangle of Eulerian numbers
    assert eulerian_polynomial(1) == (1,)
    assert eulerian_polynomial(2) == (1, 1)
    assert eulerian_polynomial(3) == (1, 4, 1)
    assert eulerian_polynomial(4) == (1, 11, 11, 1)
    assert eulerian_polynomial(5) == (1, 26, 66, 26, 1)


@pytest.mark.parametrize("r", [Fraction(0), Fraction(1), Fraction(3, 2), Fraction(-1, 2)])
def test_polylog_domain(r):
    with pytest.raises(DomainError):
        negorder_polylog(2, r)


def test_poly_geometric_sum_examples():
    q = Fraction(25, 64)
    assert poly_geometric_sum(Polynomial((1,)), Fraction(1, 2)) == 2
    assert poly_geometric_sum(Polynomial((1, 1)), Fraction(1, 2)) == 4
    assert poly_geometric_sum(Polynomial((1, 1)), q) * q ** 2 == Fraction(625, 1521)
    with pytest.raises(DomainError):
        poly_geometric_sum(Polynomial((1,)), Fraction(1))


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=5), st.integers(0, 8))
def test_poly_geometric_sum_tail_split(coeffs, x0):
    P = Polynomial(tuple(coeffs))
    r = Fraction(2, 7)
    head = sum((P(x) * r ** x for x in range(x0)), Fraction(0))
    assert poly_geometric_sum(P, r) == head + poly_geometric_sum(P, r, x0)


@given(st.lists(fractions, max_size=5), st.lists(fractions, max_size=5), fractions)
def test_polynomial_ring_laws(a, b, x):
    A, B = Polynomial(tuple(a)), Polynomial(tuple(b))
    assert (A * B)(x) == A(x) * B(x)
    assert (A + B)(x) == A(x) + B(x)
    assert (A - B)(x) == A(x) - B(x)
    assert A.shift(3)(x) == A(x + 3)
    if not B.is_zero:
        Q, R = A.divmod(B)
        assert Q * B + R == A
        assert R.is_zero or R.degree < B.degree


def test_polynomial_derivative_and_roots():
    P = Polynomial.from_roots([1, 2, 3])
    assert P == Polynomial((-6, 11, -6, 1))
    assert P.derivative() == Polynomial((11, -12, 3))
    assert Polynomial((1, -2, 3)).abs_coeffs() == Polynomial((1, 2, 3))


def test_rf_t_derivative_examples():
    z = RationalFunction(Polynomial((0, 1)), Polynomial((1,)))
    inv = RationalFunction(Polynomial((1,)), Polynomial((0, 1)))
    for x in (Fraction(2), Fraction(7, 3)):
        assert rf_t_derivative(z)(x) == 2 * x
        assert rf_t_derivative(inv)(x) == -2 / x


def test_rf_derivative_matches_numeric():
    F = RationalFunction.with_power_den(Polynomial((0, 3)), Polynomial((1, -3, 1)), 1)
    with mpmath.workprec(200):
        f = lambda t: (lambda z: 3 * z / (z * z - 3 * z + 1))(mpmath.exp(2 * t))  # noqa: E731
        dF = rf_t_derivative(F)
        z0 = Fraction(7, 1)
        t0 = mpmath.log(7) / 2
        num = mpmath.diff(f, t0)
        assert abs(to_mpf(dF(z0)) - num) < mpmath.mpf(10) ** -40


@given(st.lists(st.integers(1, 30), min_size=10, max_size=10, unique=True))
def test_normalization_does_not_change_values(points):
    F = RationalFunction.with_power_den(Polynomial((0, 2)), Polynomial((1, Fraction(-5, 2), 1)), 1)
    D2 = rf_t_derivative(rf_t_derivative(F))
    N2 = D2.normalized()
    for x in points:
        z = Fraction(x, 7)
        if z in (2, Fraction(1, 2)):
            continue
        assert D2(z) == N2(z)


@given(st.integers(-10 ** 40, 10 ** 40), st.integers(1, 10 ** 40),
       st.integers(-10 ** 40, 10 ** 40), st.integers(1, 10 ** 40))
def test_big_rational_arithmetic_exact(a, b, c, d):
    x, y = Fraction(a, b), Fraction(c, d)
    assert (x + y) - y == x


def leibniz_det(M):
    import itertools
    n = len(M)
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = Fraction(-1) ** inv
        for i in range(n):
            term *= M[i][perm[i]]
        total += term
    return total


@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(fractions, min_size=n, max_size=n),
                                                      min_size=n, max_size=n)))
def test_bareiss_matches_leibniz(M):
    assert bareiss_det(M) == leibniz_det(M)


def test_bareiss_needs_pivoting():
    assert bareiss_det([[0, 1], [1, 0]]) == -1
    assert bareiss_det([[1, 2], [2, 4]]) == 0


def test_mp_det():
    with mpmath.workprec(128):
        assert abs(mp_det([[2, 1], [1, 3]]) - 5) < mpmath.mpf(10) ** -30


@given(fractions, fractions, fractions, fractions)
def test_quadsurd_field(a, b, c, d):
    D = Fraction(6)
    x, y = QuadSurd(a, b, D), QuadSurd(c, d, D)
    assert (x + y) - y == x
    assert (x * y) == y * x
    if not (c == 0 and d == 0):
        assert (x / y) * y == x
    s = QuadSurd(Fraction(0), Fraction(1), D)
    assert s * s == 6


def test_exact_sqrt():
    assert exact_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert exact_sqrt(Fraction(2)) is None


@pytest.mark.parametrize("text,val", [("5/4", Fraction(5, 4)), ("2", Fraction(2)), ("-3/6", Fraction(-1, 2))])
def test_parse_and_format(text, val):
    assert parse_rational(text) == val
    assert parse_rational(format_rational(val)) == val


@pytest.mark.parametrize("bad", ["1.5", "1e3", "abc", "1/0"])
def test_parse_rejects_floats(bad):
    with pytest.raises((ValueError, ZeroDivisionError)):
        parse_rational(bad)


def test_precision_env(monkeypatch):
    monkeypatch.setenv("PDWBC_PRECISION", "300")
    assert default_precision() == 300
    monkeypatch.delenv("PDWBC_PRECISION")
    assert default_precision() == 256


def test_to_mpf_relative_error():
    x = Fraction(1, 3)
    with mpmath.workprec(300):
        v = to_mpf(x, 128)
        assert abs(v - mpmath.mpf(1) / 3) <= mpmath.mpf(2) ** (1 - 128) / 3
