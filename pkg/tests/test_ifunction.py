"""Periods and mirror data against closed-form hypergeometric oracles."""
import math
from fractions import Fraction

import pytest

from gwfeynman.errors import UnsupportedTarget
from gwfeynman.ifunction import make_target, normalized_periods, y_series, yukawa
from gwfeynman.rational import Q, as_fraction
from gwfeynman.series import derive_D, invert, reversion_lagrange

T = 30


def harmonic(n):
    return sum(Fraction(1, m) for m in range(1, n + 1))


def i0_coeff(spec, d):
    return Fraction(math.factorial(spec.k * d), math.prod(math.factorial(a * d) for a in spec.weights))


def i1_coeff(spec, d):
    log_deriv = spec.k * harmonic(spec.k * d) - sum(a * harmonic(a * d) for a in spec.weights)
    return i0_coeff(spec, d) * log_deriv


def test_table_constants(spec):
    expected = {
        6: (Q(11664), Q(3), -204, Q(-7, 4)),
        8: (Q(8**8, 4**4), Q(2), -296, Q(-11, 6)),
        10: (Q(10**10, 4 * 3125), Q(1), -288, Q(-17, 12)),
    }[spec.k]
    assert (spec.r, spec.p_k, spec.chi, spec.a1) == expected
    assert spec.p_k == 6 * spec.a0


def test_unsupported_target():
    with pytest.raises(UnsupportedTarget):
        make_target(9)


def test_i0_first_coefficients():
    assert [normalized_periods(make_target(k), 4).I0[1] for k in (6, 8, 10)] == [360, 1680, 15120]


def test_i0_i1_closed_form(spec):
    b = normalized_periods(spec, 12)
    for d in range(13):
        assert as_fraction(b.I0[d]) == i0_coeff(spec, d)
        assert as_fraction(b.I1[d]) == (i1_coeff(spec, d) if d else 0)


def test_period_identity(spec):
    b = normalized_periods(spec, T)
    assert b.I0 * b.I0 * b.I11 * b.I11 * b.I22 == y_series(spec, T)


def test_i22_alternative_reading_breaks_identity(spec):
    b = normalized_periods(spec, T)
    inv0 = invert(b.I0)
    wrong = 1 + derive_D((derive_D(b.I2 * inv0) + 1) * invert(b.I11))
    assert b.I0 * b.I0 * b.I11 * b.I11 * wrong != y_series(spec, T)


def test_mirror_map(spec):
    b = normalized_periods(spec, 15)
    assert b.mirrorQ[0] == 0 and b.mirrorQ[1] == 1
    assert b.inverseMirror == reversion_lagrange(b.mirrorQ)


def test_yukawa_constant_term(spec):
    assert yukawa(spec, T)[0] == spec.p_k


def test_yukawa_order_one_by_hand(spec):
    # Expand p_k Y / (I0^2 I11^3) and Q = q(1 + i1 q) to first order.
    c, i1 = i0_coeff(spec, 1), i1_coeff(spec, 1)
    n01 = as_fraction(spec.p_k) * (as_fraction(spec.r) - 2 * c - 3 * i1)
    assert n01 == {6: 7884, 8: 29504, 10: 231200}[spec.k]
    from gwfeynman.pipeline import extract_invariants

    assert as_fraction(extract_invariants(0, spec, None, 2, 10).N[1]) == n01


def test_json_shape():
    spec = make_target(6)
    data = normalized_periods(spec, 5).to_json(spec)
    assert data["k"] == 6 and data["T"] == 5
    assert data["I0"][1] == "360/1"
