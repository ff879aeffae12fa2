"""I-function, normalized periods, mirror map and Yukawa coupling.

Supported targets are the degree-``k`` hypersurfaces in weighted projective
space ``P(a_1,..,a_5)`` with ``k`` one of 6, 8, 10.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, reduce

from .errors import UnsupportedTarget
from .rational import ONE, ZERO, Q
from .series import QSeries, derive_D, exp, invert, reversion

_WEIGHTS = {
    6: (1, 1, 1, 1, 2),
    8: (1, 1, 1, 1, 4),
    10: (1, 1, 1, 2, 5),
}

# k -> (r0, r1, a0, a1, chi)
_CONSTANTS = {
    6: (Q(13, 36), Q(5, 162), Q(1, 2), Q(-7, 4), -204),
    8: (Q(11, 32), Q(105, 4096), Q(1, 3), Q(-11, 6), -296),
    10: (Q(3, 10), Q(189, 10000), Q(1, 6), Q(-17, 12), -288),
}

SUPPORTED_TARGETS = tuple(sorted(_WEIGHTS))


@dataclass(frozen=True)
class TargetSpec:
    k: int
    weights: tuple
    r: object
    p_k: object
    r0: object
    r1: object
    a0: object
    a1: object
    chi: int

    @property
    def name(self) -> str:
        return f"Z{self.k}"


def make_target(k: int) -> TargetSpec:
    if k not in _WEIGHTS:
        raise UnsupportedTarget(f"no target of degree {k}; choose one of {SUPPORTED_TARGETS}")
    w = _WEIGHTS[k]
    r = Q(k**k) / reduce(lambda acc, a: acc * a**a, w, 1)
    p_k = Q(k) / reduce(lambda acc, a: acc * a, w, 1)
    r0, r1, a0, a1, chi = _CONSTANTS[k]
    return TargetSpec(k=k, weights=w, r=r, p_k=p_k, r0=r0, r1=r1, a0=a0, a1=a1, chi=chi)


# ---------------------------------------------------------------------------
# arithmetic in Q[H]/(H^4)

_HDEG = 4


def _hmul(p, q):
    out = [ZERO] * _HDEG
    for i in range(_HDEG):
        if p[i]:
            for j in range(_HDEG - i):
                out[i + j] += p[i] * q[j]
    return out


def _hlinear(a: int, m: int):
    """``a*H + m``."""
    return [Q(m), Q(a), ZERO, ZERO]


def _hlinear_inv(a: int, m: int):
    """``1/(a*H + m) = (1/m) * sum_j (-a H / m)^j``."""
    t = -Q(a, m)
    return [ONE / m, t / m, t * t / m, t * t * t / m]


def i_series(spec: TargetSpec, T: int):
    """Return ``(I0, I1, I2, I3)`` to order ``T``.

    The ``q^d`` coefficient of ``I_j`` is the ``H^j`` coefficient of
    ``prod_{m<=kd}(kH+m) / prod_i prod_{m<=a_i d}(a_i H+m)``.  The products
    are built incrementally in ``d``.
    """
    if T < 0:
        raise ValueError("order must be non-negative")
    k, w = spec.k, spec.weights
    rows = [[ONE, ZERO, ZERO, ZERO]]
    cur = rows[0]
    for d in range(T):
        for m in range(k * d + 1, k * (d + 1) + 1):
            cur = _hmul(cur, _hlinear(k, m))
        for a in w:
            for m in range(a * d + 1, a * (d + 1) + 1):
                cur = _hmul(cur, _hlinear_inv(a, m))
        rows.append(cur)
    return tuple(QSeries([row[j] for row in rows]) for j in range(_HDEG))


@dataclass(frozen=True)
class ISeriesBundle:
    I0: QSeries
    I1: QSeries
    I2: QSeries
    I3: QSeries
    I11: QSeries
    I22: QSeries
    I33: QSeries
    mirrorQ: QSeries
    inverseMirror: QSeries

    def to_json(self, spec: TargetSpec) -> dict:
        out = {"k": spec.k, "T": self.I0.order}
        for name in ("I0", "I1", "I2", "I3", "I11", "I22", "I33", "mirrorQ", "inverseMirror"):
            out[name] = getattr(self, name).to_json()
        return out


@lru_cache(maxsize=None)
def normalized_periods(spec: TargetSpec, T: int) -> ISeriesBundle:
    I0, I1, I2, I3 = i_series(spec, T)
    inv0 = invert(I0)
    t = I1 * inv0
    I11 = 1 + derive_D(t)
    # The inner term is I1/I0.  Replacing it by I0/I0 = 1 breaks the identity
    # I0^2 I11^2 I22 = Y, which is checked in the test suite.
    I22 = 1 + derive_D((derive_D(I2 * inv0) + t) * invert(I11))
    mirror = QSeries.monomial(1, T) * exp(t)
    return ISeriesBundle(
        I0=I0, I1=I1, I2=I2, I3=I3,
        I11=I11, I22=I22, I33=I11,
        mirrorQ=mirror,
        inverseMirror=reversion(mirror),
    )


@lru_cache(maxsize=None)
def y_series(spec: TargetSpec, T: int) -> QSeries:
    return QSeries.geometric(spec.r, T)


def x_series(spec: TargetSpec, T: int) -> QSeries:
    return 1 - y_series(spec, T)


@lru_cache(maxsize=None)
def a_series(spec: TargetSpec, T: int, m: int) -> QSeries:
    """``A_m = D^m I11 / I11``."""
    b = normalized_periods(spec, T)
    cur = b.I11
    for _ in range(m):
        cur = derive_D(cur)
    return cur * invert(b.I11)


@lru_cache(maxsize=None)
def b_series(spec: TargetSpec, T: int, m: int) -> QSeries:
    """``B_m = D^m I0 / I0``."""
    b = normalized_periods(spec, T)
    cur = b.I0
    for _ in range(m):
        cur = derive_D(cur)
    return cur * invert(b.I0)


def yukawa(spec: TargetSpec, T: int) -> QSeries:
    """Genus-zero three-point function ``p_k Y / (I0^2 I11^3)`` in the q frame."""
    b = normalized_periods(spec, T)
    return spec.p_k * y_series(spec, T) * invert(b.I0 * b.I0 * b.I11 * b.I11 * b.I11)
