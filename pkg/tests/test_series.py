"""Truncated series arithmetic against naive Fraction oracles."""
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gwfeynman.errors import BadConstantTerm, NonzeroInnerConstant, NotInvertibleSeries, ZeroConstantTerm
from gwfeynman.rational import Q
from gwfeynman.series import (
    QSeries,
    compose,
    derive_D,
    exp,
    invert,
    log,
    reversion,
    reversion_lagrange,
)

from strategies import series

T = 8


def naive_mul(a, b):
    n = min(len(a), len(b))
    return [sum(Fraction(a[i]) * Fraction(b[k - i]) for i in range(k + 1)) for k in range(n)]


def naive_compose(f, g):
    n = min(len(f), len(g))
    out = [Fraction(0)] * n
    power = [Fraction(1)] + [Fraction(0)] * (n - 1)
    for c in f[:n]:
        out = [o + Fraction(c) * p for o, p in zip(out, power)]
        power = naive_mul(power, g[:n])
    return out


def as_list(s):
    return [Fraction(int(c.numerator), int(c.denominator)) for c in s.coeffs]


@given(series(T), series(T))
def test_mul_matches_convolution(a, b):
    assert as_list(a * b) == naive_mul(as_list(a), as_list(b))


@given(series(T), series(T), series(T))
def test_ring_laws(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == QSeries.constant(0, T)


@given(series(T, const=1))
def test_invert(a):
    assert a * invert(a) == QSeries.constant(1, T)


def test_invert_zero_constant():
    with pytest.raises(ZeroConstantTerm):
        invert(QSeries([0, 1, 2]))


@given(series(T, const=0))
def test_exp_log_inverse(a):
    assert log(exp(a)) == a


@given(series(T, const=0), series(T, const=0))
def test_exp_homomorphism(a, b):
    assert exp(a + b) == exp(a) * exp(b)


def test_exp_log_domain():
    with pytest.raises(BadConstantTerm):
        exp(QSeries([1, 1]))
    with pytest.raises(BadConstantTerm):
        log(QSeries([2, 1]))


@given(series(T), series(T, const=0))
def test_compose_against_naive(f, g):
    assert as_list(compose(f, g)) == naive_compose(as_list(f), as_list(g))


def test_compose_needs_zero_constant():
    with pytest.raises(NonzeroInnerConstant):
        compose(QSeries([1, 1]), QSeries([1, 1]))


@st.composite
def revertible(draw):
    s = draw(series(T, const=0))
    c1 = draw(st.integers(1, 9)) * draw(st.sampled_from([1, -1]))
    return QSeries([0, c1] + list(s.coeffs[2:]))


@given(revertible())
def test_reversion_newton_vs_lagrange(s):
    r = reversion(s)
    assert r == reversion_lagrange(s)
    ident = QSeries.monomial(1, T)
    assert compose(s, r) == ident
    assert compose(r, s) == ident


def test_reversion_known_case():
    # q/(1-q) has inverse q/(1+q)
    s = QSeries([0] + [1] * T)
    assert reversion(s) == QSeries([0] + [(-1) ** d for d in range(T)])


def test_reversion_rejects():
    with pytest.raises(NotInvertibleSeries):
        reversion(QSeries([0, 0, 1]))
    with pytest.raises(NotInvertibleSeries):
        reversion(QSeries([1, 1, 1]))


@given(series(T), series(T))
def test_D_is_derivation(a, b):
    assert derive_D(a * b) == derive_D(a) * b + a * derive_D(b)


def test_truncation_to_min_order():
    a = QSeries([1, 2, 3, 4])
    b = QSeries([1, 1])
    assert (a + b).order == 1
    assert (a * b).coeffs == (Q(1), Q(3))


@given(series(T))
def test_json_round_trip(a):
    assert QSeries.from_json(a.to_json()) == a


@given(series(T, const=1), st.integers(-3, 3))
def test_integer_powers(a, n):
    expected = QSeries.constant(1, T)
    for _ in range(abs(n)):
        expected = expected * (a if n > 0 else invert(a))
    assert a**n == expected
