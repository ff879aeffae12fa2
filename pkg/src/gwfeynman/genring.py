"""The generator ring ``Q[A, B, B2, B3, X]`` and its structure.

Polynomials are sparse maps from packed monomial keys to exact rationals.  A
key stores five 8-bit exponents and, above them, the index of at most one
ambiguity unknown ``L_i`` (``0`` meaning none).  Ambiguity unknowns therefore
enter affine-linearly, and multiplying two of them raises
:class:`AmbiguityNonlinear`.

``Y`` never appears: it is always rewritten as ``1 - X``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping

from .errors import (
    AmbiguityNonlinear,
    GaugeDegreeViolation,
    UnboundAmbiguity,
)
from .ifunction import TargetSpec, a_series, b_series, x_series
from .rational import ONE, ZERO, RationalLike, fmt_q, parse_q, to_q
from .series import QSeries

_BITS = 8
_FIELD = (1 << _BITS) - 1
_NVARS = 5
_LAM_SHIFT = _BITS * _NVARS
_EXP_MASK = (1 << _LAM_SHIFT) - 1


def _unpack(key: int) -> tuple:
    return tuple((key >> (_BITS * i)) & _FIELD for i in range(_NVARS))


def _pack(exps, lam: int = 0) -> int:
    key = lam << _LAM_SHIFT
    for i, e in enumerate(exps):
        if e < 0 or e > _FIELD:
            raise OverflowError("exponent out of range")
        key |= e << (_BITS * i)
    return key


class _Poly:
    """Sparse polynomial over five named variables; see module docstring."""

    VARS: tuple = ()
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, object] | None = None):
        self.terms: dict = {}
        if terms:
            for key, c in terms.items():
                c = to_q(c)
                if c:
                    self.terms[key] = c

    @classmethod
    def _raw(cls, terms: dict):
        obj = cls.__new__(cls)
        obj.terms = terms
        return obj

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, c: RationalLike):
        return cls({0: c})

    @classmethod
    def zero(cls):
        return cls._raw({})

    @classmethod
    def one(cls):
        return cls._raw({0: ONE})

    @classmethod
    def var(cls, name: str):
        i = cls.VARS.index(name)
        return cls._raw({1 << (_BITS * i): ONE})

    @classmethod
    def lam(cls, i: int):
        if i < 1:
            raise ValueError("ambiguity unknowns are numbered from 1")
        return cls._raw({i << _LAM_SHIFT: ONE})

    @classmethod
    def from_univariate(cls, name: str, coeffs):
        """``sum_j coeffs[j] * name^j``."""
        i = cls.VARS.index(name)
        return cls({j << (_BITS * i): c for j, c in enumerate(coeffs)})

    @classmethod
    def gens(cls):
        return tuple(cls.var(v) for v in cls.VARS)

    def _coerce(self, other):
        if isinstance(other, _Poly):
            if type(other) is not type(self):
                raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
            return other
        return type(self).const(other)

    # -- ring operations ----------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        out = dict(self.terms)
        for k, c in o.terms.items():
            v = out.get(k, ZERO) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return self._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return self._raw({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, _Poly):
            c = to_q(other)
            if not c:
                return self.zero()
            return self._raw({k: c * v for k, v in self.terms.items()})
        o = self._coerce(other)
        out: dict = {}
        get = out.get
        for k1, c1 in self.terms.items():
            l1 = k1 >> _LAM_SHIFT
            for k2, c2 in o.terms.items():
                if l1 and (k2 >> _LAM_SHIFT):
                    raise AmbiguityNonlinear("product of two ambiguity unknowns")
                k = k1 + k2
                out[k] = get(k, ZERO) + c1 * c2
        return self._raw({k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = self.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        return self * (ONE / to_q(other))

    def __eq__(self, other) -> bool:
        if isinstance(other, _Poly):
            return type(other) is type(self) and self.terms == other.terms
        try:
            return self.terms == self.const(other).terms
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        return hash((type(self).__name__, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # -- inspection ---------------------------------------------------------
    def items(self):
        """Yield ``(exponents, lam_index, coefficient)`` in canonical order."""
        for key in sorted(self.terms, key=_sort_key):
            yield _unpack(key & _EXP_MASK), key >> _LAM_SHIFT, self.terms[key]

    def lams(self) -> set:
        return {k >> _LAM_SHIFT for k in self.terms} - {0}

    def has_ambiguity(self) -> bool:
        return any(k >> _LAM_SHIFT for k in self.terms)

    def lam_free(self):
        return self._raw({k: c for k, c in self.terms.items() if not k >> _LAM_SHIFT})

    def lam_coefficient(self, i: int):
        """Coefficient polynomial of ``L_i``."""
        return self._raw({k & _EXP_MASK: c for k, c in self.terms.items() if k >> _LAM_SHIFT == i})

    def degree_in(self, name: str) -> int:
        i = self.VARS.index(name)
        return max(((k >> (_BITS * i)) & _FIELD for k in self.terms), default=0)

    def total_degree(self) -> int:
        return max((sum(_unpack(k & _EXP_MASK)) for k in self.terms), default=0)

    def involves(self, name: str) -> bool:
        i = self.VARS.index(name)
        return any((k >> (_BITS * i)) & _FIELD for k in self.terms)

    def constant_term(self):
        return self.terms.get(0, ZERO)

    def univariate_coeffs(self, name: str) -> list:
        """Coefficients in ``name`` if this is a polynomial in ``name`` alone."""
        i = self.VARS.index(name)
        out: list = []
        for k, c in self.terms.items():
            if k & ~(_FIELD << (_BITS * i)):
                raise ValueError(f"polynomial is not univariate in {name}")
            e = (k >> (_BITS * i)) & _FIELD
            out.extend([ZERO] * (e + 1 - len(out)))
            out[e] = c
        return out or [ZERO]

    # -- calculus and substitution -----------------------------------------
    def partial(self, name: str):
        i = self.VARS.index(name)
        shift = _BITS * i
        unit = 1 << shift
        out = {}
        for k, c in self.terms.items():
            e = (k >> shift) & _FIELD
            if e:
                out[k - unit] = c * e
        return self._raw(out)

    def substitute(
        self,
        images: Mapping[str, object],
        one,
        lam: Callable[[int], object] | Mapping[int, object] | None = None,
    ):
        """Evaluate in another commutative ring.

        ``images`` sends each variable to an element of the target ring and
        ``one`` is that ring's identity.  ``lam`` supplies images of the
        ambiguity unknowns; a missing image raises :class:`UnboundAmbiguity`.
        """
        power_cache: dict = {}

        def power(name, e):
            key = (name, e)
            if key not in power_cache:
                power_cache[key] = images[name] if e == 1 else power(name, e - 1) * images[name]
            return power_cache[key]

        def lam_image(i):
            if lam is None:
                raise UnboundAmbiguity(f"ambiguity unknown L{i} has no assigned value")
            if callable(lam):
                return lam(i)
            if i not in lam:
                raise UnboundAmbiguity(f"ambiguity unknown L{i} has no assigned value")
            return lam[i]

        acc = one * 0
        for key in sorted(self.terms, key=_sort_key):
            c = self.terms[key]
            term = None
            for name, e in zip(self.VARS, _unpack(key & _EXP_MASK)):
                if e:
                    f = power(name, e)
                    term = f if term is None else term * f
            li = key >> _LAM_SHIFT
            if li:
                lv = lam_image(li)
                term = lv if term is None else term * lv
            acc = acc + (one * c if term is None else term * c)
        return acc

    # -- text form ------------------------------------------------------------
    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps, li, c in self.items():
            factors = [fmt_q(c)]
            for name, e in zip(self.VARS, exps):
                if e == 1:
                    factors.append(name)
                elif e:
                    factors.append(f"{name}^{e}")
            if li:
                factors.append(f"L{li}")
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({str(self)!r})"

    @classmethod
    def parse(cls, text: str):
        text = text.strip()
        if text == "0":
            return cls.zero()
        out = cls.zero()
        for part in text.split(" + "):
            factors = part.strip().split("*")
            term = cls.const(parse_q(factors[0]))
            for f in factors[1:]:
                m = re.fullmatch(r"([A-Za-z][A-Za-z0-9]*?)(?:\^(\d+))?", f)
                if not m:
                    raise ValueError(f"cannot parse factor {f!r}")
                name, e = m.group(1), int(m.group(2) or 1)
                if re.fullmatch(r"L\d+", name) and name not in cls.VARS:
                    if e != 1:
                        raise AmbiguityNonlinear("ambiguity unknowns enter linearly")
                    term = term * cls.lam(int(name[1:]))
                elif name == "Y" and "X" in cls.VARS:
                    term = term * (1 - cls.var("X")) ** e
                else:
                    term = term * cls.var(name) ** e
            out = out + term
        return out


def _sort_key(key: int):
    return (key >> _LAM_SHIFT, sum(_unpack(key & _EXP_MASK)), _unpack(key & _EXP_MASK))


class GenPoly(_Poly):
    VARS = ("A", "B", "B2", "B3", "X")
    __slots__ = ()


class ModPoly(_Poly):
    """Polynomial in the modified generators ``E1, E2, E3`` and ``B, X``."""

    VARS = ("E1", "E2", "E3", "B", "X")
    __slots__ = ()


A, B, B2, B3, X = GenPoly.gens()


def partial(p: GenPoly, v: str) -> GenPoly:
    return p.partial(v)


# ---------------------------------------------------------------------------
# derivation

def a2_relation(spec: TargetSpec) -> GenPoly:
    """``A_2`` expressed in the generators."""
    return 2 * B * B - 2 * A * B - 4 * B2 - X * (A + 2 * B + spec.r0)


def b4_relation(spec: TargetSpec) -> GenPoly:
    """``B_4`` expressed in the generators."""
    return -X * (2 * B3 + (1 + spec.r0) * B2 + spec.r0 * B + spec.r1)


@lru_cache(maxsize=None)
def _d_images(spec: TargetSpec) -> dict:
    return {
        "A": a2_relation(spec) - A * A,
        "B": B2 - B * B,
        "B2": B3 - B * B2,
        "B3": b4_relation(spec) - B * B3,
        "X": X - X * X,
    }


def derive(p: GenPoly, spec: TargetSpec) -> GenPoly:
    """Apply ``D = q d/dq`` through the chain rule on the generators."""
    images = _d_images(spec)
    acc = GenPoly.zero()
    for v in GenPoly.VARS:
        dp = p.partial(v)
        if dp:
            acc = acc + dp * images[v]
    return acc


# ---------------------------------------------------------------------------
# evaluation to q-series

def generator_series(spec: TargetSpec, T: int) -> dict:
    return {
        "A": a_series(spec, T, 1),
        "B": b_series(spec, T, 1),
        "B2": b_series(spec, T, 2),
        "B3": b_series(spec, T, 3),
        "X": x_series(spec, T),
    }


def eval_hom(p: GenPoly, spec: TargetSpec, T: int, ambiguity=None) -> QSeries:
    """Substitute the generator q-series into ``p``.

    ``ambiguity`` maps ``i`` to a rational value of ``L_i``.
    """
    lam = None
    if ambiguity is not None:
        lam = {i: QSeries.constant(v, T) for i, v in dict(ambiguity).items()}
    return p.substitute(generator_series(spec, T), QSeries.constant(1, T), lam)


# ---------------------------------------------------------------------------
# gauge, propagators, modified generators

_GAUGE_BOUNDS = {"c11": 1, "c12": 1, "c2": 2, "c3": 3}


def _trim(coeffs) -> tuple:
    cs = [to_q(c) for c in coeffs]
    while cs and not cs[-1]:
        cs.pop()
    return tuple(cs)


@dataclass(frozen=True)
class Gauge:
    """Gauge polynomials in ``X``, each stored as ascending coefficients."""

    c11: tuple = ()
    c12: tuple = ()
    c2: tuple = ()
    c3: tuple = ()

    def __post_init__(self):
        for name, bound in _GAUGE_BOUNDS.items():
            cs = _trim(getattr(self, name))
            if len(cs) - 1 > bound:
                raise GaugeDegreeViolation(
                    f"{name} has degree {len(cs) - 1} in X; at most {bound} is allowed"
                )
            object.__setattr__(self, name, cs)

    @classmethod
    def zero(cls) -> "Gauge":
        return cls()

    def poly(self, name: str) -> GenPoly:
        return GenPoly.from_univariate("X", getattr(self, name))

    def is_zero(self) -> bool:
        return not (self.c11 or self.c12 or self.c2 or self.c3)

    def to_json(self) -> dict:
        return {name: [fmt_q(c) for c in getattr(self, name)] for name in _GAUGE_BOUNDS}

    @classmethod
    def from_json(cls, data: Mapping) -> "Gauge":
        unknown = set(data) - set(_GAUGE_BOUNDS)
        if unknown:
            raise ValueError(f"unknown gauge entries {sorted(unknown)}")
        return cls(**{k: tuple(to_q(c) for c in v) for k, v in data.items()})


@dataclass(frozen=True)
class PropagatorSet:
    E_psi: GenPoly
    E_phiphi: GenPoly
    E_phipsi: GenPoly
    E_psipsi: GenPoly
    E_1phipsi: GenPoly
    E_1psi2: GenPoly


@dataclass(frozen=True)
class ModifiedSet:
    E1: GenPoly
    E2: GenPoly
    E3: GenPoly


@lru_cache(maxsize=None)
def propagators(spec: TargetSpec, gauge: Gauge = Gauge()) -> PropagatorSet:
    c11, c12, c2, c3 = (gauge.poly(n) for n in ("c11", "c12", "c2", "c3"))
    e_psi = B + c11
    e_pp = A + 2 * B + c12
    e_pq = -B2 - c12 * B + c2
    e_qq = -B3 + (B - X) * B2 - spec.r0 * B * X + c12 * B * B - 2 * c2 * B + c3
    return PropagatorSet(
        E_psi=e_psi,
        E_phiphi=e_pp,
        E_phipsi=e_pq,
        E_psipsi=e_qq,
        E_1phipsi=-e_psi * e_pp - e_pq,
        E_1psi2=-e_psi * e_pq - e_qq,
    )


@lru_cache(maxsize=None)
def modified(spec: TargetSpec, gauge: Gauge = Gauge()) -> ModifiedSet:
    p = propagators(spec, gauge)
    return ModifiedSet(
        E1=p.E_phiphi,
        E2=p.E_phipsi + p.E_psi * p.E_phiphi,
        E3=p.E_psipsi + 2 * p.E_psi * p.E_phipsi + p.E_psi * p.E_psi * p.E_phiphi,
    )


@lru_cache(maxsize=None)
def _basis_change(spec: TargetSpec, gauge: Gauge):
    """Images of ``A, B2, B3`` in terms of ``E1, E2, E3, B, X``."""
    e1, e2, e3, b, x = ModPoly.gens()

    def gp(name):
        return ModPoly.from_univariate("X", getattr(gauge, name))

    c11, c12, c2, c3 = gp("c11"), gp("c12"), gp("c2"), gp("c3")
    e_psi = b + c11
    e_pq = e2 - e_psi * e1
    e_qq = e3 - 2 * e_psi * e_pq - e_psi * e_psi * e1
    img_a = e1 - 2 * b - c12
    img_b2 = -e_pq - c12 * b + c2
    img_b3 = (b - x) * img_b2 - spec.r0 * b * x + c12 * b * b - 2 * c2 * b + c3 - e_qq
    return {"A": img_a, "B": b, "B2": img_b2, "B3": img_b3, "X": x}


@dataclass(frozen=True)
class ModifiedBasisResult:
    poly: ModPoly
    member: bool


def to_modified_basis(p: GenPoly, spec: TargetSpec, gauge: Gauge = Gauge()) -> ModifiedBasisResult:
    mp = p.substitute(_basis_change(spec, gauge), ModPoly.one(), ModPoly.lam)
    return ModifiedBasisResult(poly=mp, member=not mp.involves("B"))


def from_modified_basis(mp: ModPoly, spec: TargetSpec, gauge: Gauge = Gauge()) -> GenPoly:
    m = modified(spec, gauge)
    images = {"E1": m.E1, "E2": m.E2, "E3": m.E3, "B": B, "X": X}
    return mp.substitute(images, GenPoly.one(), GenPoly.lam)


def closure_rules(spec: TargetSpec) -> dict:
    """The derivatives of ``E1, E2, E3`` written in the modified basis."""
    e1, e2, e3, _b, x = ModPoly.gens()
    return {
        "E1": -x * (e1 + spec.r0) - e1 * e1 + 2 * e2,
        "E2": -x * e2 - e1 * e2 + e3,
        "E3": spec.r1 * x - x * e3 - e2 * e2,
    }
