"""Genus-by-genus solver: seeds, ambiguity, anomaly checks and invariants."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

from .errors import UnresolvedAmbiguity
from .feynman import CorrelatorTable, leading_decomposition, recursion_step
from .genring import A, B, B2, X, Gauge, GenPoly, eval_hom
from .ifunction import TargetSpec, normalized_periods, y_series, yukawa
from .quantization import CheckResult
from .rational import ONE, Q, fmt_q, to_q
from .series import QSeries, compose

__all__ = [
    "recursion_step",
    "genus1_seed",
    "bernoulli",
    "degree0_constant",
    "AmbiguitySpec",
    "solve_genus",
    "hae_check",
    "extract_invariants",
    "genus0_bps",
    "genus1_bps",
    "InvariantReport",
    "HAEReport",
    "PipelineResult",
    "first_unknown",
    "run_pipeline",
]


def genus1_seed(spec: TargetSpec) -> GenPoly:
    """``P_{1,1} = -A/2 + (chi/24 - 2) B - X/12 + a1``."""
    return -A / 2 + (Q(spec.chi, 24) - 2) * B - X / 12 + spec.a1


@lru_cache(maxsize=None)
def bernoulli(n: int):
    """Bernoulli number ``B_n`` with ``B_1 = -1/2``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    bs = [ONE]
    for m in range(1, n + 1):
        bs.append(-sum(math.comb(m + 1, k) * bs[k] for k in range(m)) / (m + 1))
    return bs[n]


def degree0_constant(g: int, spec: TargetSpec):
    """Constant-map contribution ``N_{g,0}`` for ``g >= 2``."""
    if g < 2:
        raise ValueError("the closed formula applies for g >= 2")
    num = (-1) ** g * spec.chi * abs(bernoulli(2 * g)) * abs(bernoulli(2 * g - 2))
    return num / (4 * g * (2 * g - 2) * math.factorial(2 * g - 2))


def first_unknown(g: int) -> int:
    """Index of the first ambiguity unknown of genus ``g``; genera are stacked."""
    return 1 + sum(3 * h - 3 for h in range(2, g))


@dataclass(frozen=True)
class AmbiguitySpec:
    """Holomorphic ambiguity at genus ``g``: the ``X^1 .. X^{3g-3}`` coefficients.

    ``values`` is a tuple of rationals, or ``None`` for symbolic unknowns.
    The constant term is never part of this data.
    """

    g: int
    values: tuple | None = None

    def __post_init__(self):
        if self.g < 2:
            raise ValueError("ambiguities exist for g >= 2")
        if self.values is not None:
            vals = tuple(to_q(v) for v in self.values)
            if len(vals) != 3 * self.g - 3:
                raise ValueError(f"genus {self.g} needs {3 * self.g - 3} ambiguity values, got {len(vals)}")
            object.__setattr__(self, "values", vals)

    @classmethod
    def symbolic(cls, g: int) -> "AmbiguitySpec":
        return cls(g, None)

    @classmethod
    def zero(cls, g: int) -> "AmbiguitySpec":
        return cls(g, (0,) * (3 * g - 3))

    @property
    def is_symbolic(self) -> bool:
        return self.values is None

    def unknowns(self) -> list:
        start = first_unknown(self.g)
        return list(range(start, start + 3 * self.g - 3))

    def polynomial(self) -> GenPoly:
        """``sum_i lambda_i X^i`` (``i >= 1``)."""
        out = GenPoly.zero()
        if self.values is None:
            for i, li in enumerate(self.unknowns(), start=1):
                out = out + GenPoly.lam(li) * X**i
        else:
            for i, v in enumerate(self.values, start=1):
                out = out + v * X**i
        return out

    def to_json(self):
        if self.values is None:
            return "symbolic"
        return [fmt_q(v) for v in self.values]


def f_constant_term(g: int, spec: TargetSpec, non_leading: GenPoly) -> object:
    """Constant term of ``f_g`` given the non-leading sum.

    ``P_g`` at ``q = 0`` equals ``p_k^{g-1} N_{g,0}``, and every generator
    vanishes there, so the constant of ``f_g = P_g + NL`` is that value plus
    the constant term of ``NL``.  The latter is zero at zero gauge.
    """
    return spec.p_k ** (g - 1) * degree0_constant(g, spec) + non_leading.lam_free().constant_term()


@dataclass(frozen=True)
class GenusSolution:
    g: int
    P: GenPoly
    f: GenPoly
    non_leading: GenPoly


def solve_genus(
    g: int,
    amb: AmbiguitySpec,
    gauge: Gauge,
    spec: TargetSpec,
    table: CorrelatorTable,
    jobs: int = 1,
) -> GenusSolution:
    """Compute ``P_g = f_g - NL_g`` and store it into ``table``."""
    if amb.g != g:
        raise ValueError("ambiguity genus does not match")
    nl = leading_decomposition(g, gauge, spec, table, jobs)
    f = GenPoly.const(f_constant_term(g, spec, nl)) + amb.polynomial()
    P = f - nl
    table.set_genus(g, 0, P)
    return GenusSolution(g, P, f, nl)


# ---------------------------------------------------------------------------
# anomaly equations


def hae1_rhs(g: int, table: CorrelatorTable, second_index: int = 1) -> GenPoly:
    """``1/2 (P_{g-1,2} + sum_{g1+g2=g, gi>=1} P_{g1,1} P_{g2,k})`` with ``k = second_index``."""
    acc = table.get(g - 1, 2)
    for g1 in range(1, g):
        acc = acc + table.get(g1, 1) * table.get(g - g1, second_index)
    return acc / 2


def hae2_operator(p: GenPoly, spec: TargetSpec, sign: int = 1) -> GenPoly:
    """``(-2 d_A + d_B + (A+2B) d_B2 + sign ((B-X)(A+2B) - B2 - r0 X) d_B3) p``."""
    coeff = (B - X) * (A + 2 * B) - B2 - spec.r0 * X
    return (
        -2 * p.partial("A")
        + p.partial("B")
        + (A + 2 * B) * p.partial("B2")
        + sign * coeff * p.partial("B3")
    )


def _first_term(p: GenPoly) -> str:
    text = str(p)
    return text.split(" + ")[0] if text else ""


@dataclass(frozen=True)
class HAEReport:
    g: int
    checks: tuple
    literal: tuple = ()

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list:
        out = [c.line() for c in self.checks]
        out += [c.line() + " (alternative reading, reported only)" for c in self.literal]
        return out


def hae_check(g: int, spec: TargetSpec, gauge: Gauge, table: CorrelatorTable) -> HAEReport:
    """Check both anomaly equations for ``P_g``.

    The first equation pairs ``P_{g1,1}`` with ``P_{g2,1}``, and the first-order
    coefficient of ``d_B3`` in the second enters with a plus sign; these are the
    forms under which the equations hold.  The literal variants (``P_{g2,2}``,
    minus sign) are evaluated as well and reported separately.
    """
    P = table.get(g, 0)

    def check(name, residual):
        return CheckResult(name, residual.is_zero(), "" if residual.is_zero() else "residual term " + _first_term(residual))

    r1 = -P.partial("A") - hae1_rhs(g, table, 1)
    r2 = hae2_operator(P, spec, +1)
    l1 = -P.partial("A") - hae1_rhs(g, table, 2)
    l2 = hae2_operator(P, spec, -1)
    return HAEReport(
        g,
        (check(f"hae1 Z{spec.k} g={g}", r1), check(f"hae2 Z{spec.k} g={g}", r2)),
        (check(f"hae1 Z{spec.k} g={g} with P_(g2,2)", l1), check(f"hae2 Z{spec.k} g={g} with minus sign", l2)),
    )


# ---------------------------------------------------------------------------
# invariants


@dataclass(frozen=True)
class InvariantReport:
    g: int
    N: tuple  # N[d] for d = 0..Dmax; N[0] is None when undefined
    bps: tuple = ()  # n_{g,d} for d = 1..Dmax when available

    def to_json(self) -> dict:
        return {
            "genus": self.g,
            "N": [None if v is None else fmt_q(v) for v in self.N],
            "bps": [fmt_q(v) for v in self.bps],
        }


def _pull_back(s: QSeries, spec: TargetSpec, T: int) -> QSeries:
    return compose(s, normalized_periods(spec, T).inverseMirror)


def genus0_bps(N: Sequence) -> tuple:
    """``n_d = N_d - sum_{e | d, e < d} n_e / (d/e)^3`` for ``d >= 1``."""
    n = {}
    for d in range(1, len(N)):
        v = N[d]
        for e in range(1, d):
            if d % e == 0:
                v -= n[e] / Q(d // e) ** 3
        n[d] = v
    return tuple(n[d] for d in range(1, len(N)))


def genus1_bps(N0: Sequence, N1: Sequence) -> tuple:
    """Invert ``N_{1,d} = sum_{k | d} (n_{1,d/k} + n_{0,d/k}/12) / k``."""
    n0 = genus0_bps(N0)
    n1 = {}
    for d in range(1, len(N1)):
        v = N1[d]
        for k in range(2, d + 1):
            if d % k == 0:
                e = d // k
                v -= (n1[e] + n0[e - 1] / 12) / k
        n1[d] = v - n0[d - 1] / 12
    return tuple(n1[d] for d in range(1, len(N1)))


def extract_invariants(g: int, spec: TargetSpec, table: CorrelatorTable | None, Dmax: int, T: int | None = None) -> InvariantReport:
    T = max(Dmax, T or 0)
    if g == 0:
        s = _pull_back(yukawa(spec, T), spec, T)
        N = [None] + [s[d] / Q(d) ** 3 for d in range(1, Dmax + 1)]
        return InvariantReport(0, tuple(N), genus0_bps(N))
    if g == 1:
        P11 = table.get(1, 1)
        if P11.has_ambiguity():
            raise UnresolvedAmbiguity("P_{1,1} contains ambiguity unknowns")
        b = normalized_periods(spec, T)
        s = _pull_back(eval_hom(P11, spec, T) / b.I11, spec, T)
        N = [s[0]] + [s[d] / d for d in range(1, Dmax + 1)]
        return InvariantReport(1, tuple(N))
    P = table.get(g, 0)
    if P.has_ambiguity():
        raise UnresolvedAmbiguity(f"P_{g} still contains ambiguity unknowns {sorted(P.lams())}")
    b = normalized_periods(spec, T)
    py = y_series(spec, T) * spec.p_k
    s = eval_hom(P, spec, T) * b.I0 ** (2 * g - 2) * py ** (1 - g)
    s = _pull_back(s, spec, T)
    N = [degree0_constant(g, spec)] + [s[d] for d in range(1, Dmax + 1)]
    return InvariantReport(g, tuple(N))


# ---------------------------------------------------------------------------
# whole run


@dataclass
class PipelineResult:
    spec: TargetSpec
    gauge: Gauge
    table: CorrelatorTable
    solutions: dict = field(default_factory=dict)
    ambiguities: dict = field(default_factory=dict)

    def P(self, g: int) -> GenPoly:
        return self.table.get(g, 0) if g >= 2 else self.table.get(g, 3 if g == 0 else 1)


def run_pipeline(
    spec: TargetSpec,
    G: int,
    gauge: Gauge = Gauge(),
    ambiguities: Mapping[int, AmbiguitySpec] | None = None,
    jobs: int = 1,
) -> PipelineResult:
    """Fill the correlator table through genus ``G``.

    Genera without an ambiguity entry raise :class:`UnresolvedAmbiguity`.
    """
    ambiguities = dict(ambiguities or {})
    table = CorrelatorTable(spec)
    table.set_genus(1, 1, genus1_seed(spec))
    result = PipelineResult(spec, gauge, table)
    for g in range(2, G + 1):
        if g not in ambiguities:
            raise UnresolvedAmbiguity(f"no ambiguity supplied for genus {g}")
        result.ambiguities[g] = ambiguities[g]
        result.solutions[g] = solve_genus(g, ambiguities[g], gauge, spec, table, jobs)
    return result
