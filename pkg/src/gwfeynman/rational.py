"""Exact rationals used throughout the package.

All arithmetic is done with :class:`gmpy2.mpq`, which is always kept in lowest
terms with a positive denominator.  ``Fraction`` and ``int`` inputs are
accepted wherever a rational is expected.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Union

import gmpy2

Q = gmpy2.mpq
ZERO = Q(0)
ONE = Q(1)

RationalLike = Union[int, Fraction, "gmpy2.mpq", str]


def to_q(value: RationalLike) -> "gmpy2.mpq":
    """Coerce ``value`` to an exact rational; floats are rejected."""
    if isinstance(value, float):
        raise TypeError("floating point values are not exact rationals")
    if isinstance(value, Fraction):
        return Q(value.numerator, value.denominator)
    if isinstance(value, str):
        return parse_q(value)
    return Q(value)


def fmt_q(value: RationalLike) -> str:
    """Serialize as ``"p/q"`` (the denominator is always written)."""
    v = to_q(value)
    return f"{v.numerator}/{v.denominator}"


def parse_q(text: str) -> "gmpy2.mpq":
    text = text.strip()
    if "/" in text:
        p, q = text.split("/")
        return Q(int(p), int(q))
    return Q(int(text))


def as_fraction(value: RationalLike) -> Fraction:
    v = to_q(value)
    return Fraction(int(v.numerator), int(v.denominator))
