"""Truncated formal power series in ``q`` with exact rational coefficients.

A :class:`QSeries` of order ``T`` knows the coefficients of ``q^0 .. q^T``.
Binary operations between series of different orders truncate to the smaller
order, so no operation ever reports precision it does not have.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from .errors import (
    BadConstantTerm,
    NonzeroInnerConstant,
    NotInvertibleSeries,
    ZeroConstantTerm,
)
from .rational import ONE, ZERO, Q, RationalLike, fmt_q, parse_q, to_q


class QSeries:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[RationalLike], order: int | None = None):
        cs = [to_q(c) for c in coeffs]
        if order is not None:
            if order < 0:
                raise ValueError("order must be non-negative")
            cs = (cs + [ZERO] * (order + 1 - len(cs)))[: order + 1]
        if not cs:
            raise ValueError("a series needs at least the constant coefficient")
        self.coeffs: tuple = tuple(cs)

    # -- construction -------------------------------------------------------
    @classmethod
    def constant(cls, c: RationalLike, order: int) -> "QSeries":
        return cls([c], order)

    @classmethod
    def monomial(cls, d: int, order: int, c: RationalLike = 1) -> "QSeries":
        cs = [ZERO] * (order + 1)
        if d <= order:
            cs[d] = to_q(c)
        return cls(cs)

    @classmethod
    def geometric(cls, ratio: RationalLike, order: int) -> "QSeries":
        """``1/(1 - ratio*q)``."""
        r = to_q(ratio)
        return cls([r**d for d in range(order + 1)])

    # -- basic protocol -----------------------------------------------------
    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, d: int):
        return self.coeffs[d]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, QSeries):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        shown = ", ".join(str(c) for c in self.coeffs[:6])
        more = ", ..." if len(self.coeffs) > 6 else ""
        return f"QSeries([{shown}{more}], order={self.order})"

    def truncate(self, order: int) -> "QSeries":
        if order > self.order:
            raise ValueError("cannot raise the truncation order of a series")
        return QSeries(self.coeffs[: order + 1])

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def _coerce(self, other) -> "QSeries":
        if isinstance(other, QSeries):
            return other
        return QSeries.constant(other, self.order)

    # -- ring operations ----------------------------------------------------
    def __add__(self, other) -> "QSeries":
        o = self._coerce(other)
        n = min(len(self.coeffs), len(o.coeffs))
        return QSeries([a + b for a, b in zip(self.coeffs[:n], o.coeffs[:n])])

    __radd__ = __add__

    def __neg__(self) -> "QSeries":
        return QSeries([-a for a in self.coeffs])

    def __sub__(self, other) -> "QSeries":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "QSeries":
        return self._coerce(other) - self

    def __mul__(self, other) -> "QSeries":
        if not isinstance(other, QSeries):
            c = to_q(other)
            return QSeries([c * a for a in self.coeffs])
        T = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = [ZERO] * (T + 1)
        for i in range(T + 1):
            ai = a[i]
            if not ai:
                continue
            for j in range(T + 1 - i):
                bj = b[j]
                if bj:
                    out[i + j] += ai * bj
        return QSeries(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "QSeries":
        if n < 0:
            return invert(self) ** (-n)
        result = QSeries.constant(1, self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other) -> "QSeries":
        if isinstance(other, QSeries):
            return self * invert(other)
        return self * (ONE / to_q(other))

    def __rtruediv__(self, other) -> "QSeries":
        return self._coerce(other) * invert(self)

    # -- serialization ------------------------------------------------------
    def to_json(self) -> list[str]:
        return [fmt_q(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "QSeries":
        return cls([parse_q(s) for s in data])


def add(s1: QSeries, s2: QSeries) -> QSeries:
    return s1 + s2


def mul(s1: QSeries, s2: QSeries) -> QSeries:
    return s1 * s2


def derive_D(s: QSeries) -> QSeries:
    """Apply ``D = q d/dq``: the coefficient of ``q^d`` is multiplied by ``d``."""
    return QSeries([d * c for d, c in enumerate(s.coeffs)])


def invert(s: QSeries) -> QSeries:
    c0 = s.coeffs[0]
    if not c0:
        raise ZeroConstantTerm("cannot invert a series with zero constant term")
    inv0 = ONE / c0
    a = s.coeffs
    b = [ZERO] * len(a)
    b[0] = inv0
    for m in range(1, len(a)):
        acc = ZERO
        for k in range(1, m + 1):
            if a[k]:
                acc += a[k] * b[m - k]
        b[m] = -acc * inv0
    return QSeries(b)


def exp(s: QSeries) -> QSeries:
    if s.coeffs[0]:
        raise BadConstantTerm("exp needs a series with zero constant term")
    a = s.coeffs
    e = [ZERO] * len(a)
    e[0] = ONE
    # n e_n = sum_k k a_k e_{n-k}, from D(e) = e D(s)
    for n in range(1, len(a)):
        acc = ZERO
        for k in range(1, n + 1):
            if a[k]:
                acc += k * a[k] * e[n - k]
        e[n] = acc / n
    return QSeries(e)


def log(s: QSeries) -> QSeries:
    if s.coeffs[0] != 1:
        raise BadConstantTerm("log needs a series with constant term 1")
    ratio = derive_D(s) * invert(s)
    return QSeries([ZERO] + [ratio.coeffs[n] / n for n in range(1, len(ratio))])


def compose(f: QSeries, g: QSeries) -> QSeries:
    """Return ``f(g(q))``; requires ``g(0) = 0``."""
    if g.coeffs[0]:
        raise NonzeroInnerConstant("inner series of a composition must vanish at q=0")
    T = min(f.order, g.order)
    g = g.truncate(T)
    acc = QSeries.constant(f.coeffs[T], T)
    for c in reversed(f.coeffs[:T]):
        acc = acc * g + c
    return acc


def reversion(s: QSeries) -> QSeries:
    """Compositional inverse ``r`` with ``s(r(q)) = q``, by Newton iteration."""
    _check_revertible(s)
    T = s.order
    ident = QSeries.monomial(1, T)
    ds = QSeries([(d + 1) * s.coeffs[d + 1] for d in range(T)], T)  # s'(q)
    r = ident * (ONE / s.coeffs[1])
    prec = 1
    while prec < T:
        prec = min(2 * prec, T)
        resid = compose(s, r) - ident
        r = r - resid * invert(compose(ds, r))
    return r


def reversion_lagrange(s: QSeries) -> QSeries:
    """Compositional inverse by the Lagrange inversion formula.

    ``[q^n] r = (1/n) [w^{n-1}] (w / s(w))^n``.  Independent of
    :func:`reversion`; used to cross-check it.
    """
    _check_revertible(s)
    T = s.order
    # s(w)/w as a unit series, known to order T-1
    unit = QSeries(s.coeffs[1:], T - 1) if T >= 1 else QSeries([s.coeffs[0]])
    phi = invert(unit)
    out = [ZERO] * (T + 1)
    power = QSeries.constant(1, phi.order)
    for n in range(1, T + 1):
        power = power * phi
        out[n] = power.coeffs[n - 1] / n
    return QSeries(out)


def _check_revertible(s: QSeries) -> None:
    if s.order < 1 or s.coeffs[0] or not s.coeffs[1]:
        raise NotInvertibleSeries("reversion needs c0 = 0 and c1 != 0")


__all__ = [
    "QSeries",
    "Q",
    "add",
    "mul",
    "derive_D",
    "invert",
    "exp",
    "log",
    "compose",
    "reversion",
    "reversion_lagrange",
]
