"""Quadratic-operator calculus on truncated potentials.

A :class:`Potential` is a finite sum of terms ``hbar^h * monomial`` with
generator-ring coefficients, where ``h = g - 1`` for genus ``g``.  Terms are
kept when ``h <= G - 1`` and their weight ``2h + deg`` is at most ``W``.  For
stable input (every term of weight at least one) the kept range is closed
under sums, products, derivatives paired with one power of ``hbar``, and the
exponential and logarithm used below, so no truncation error leaks into the
kept terms.

Two independent evaluations of ``log(exp(hbar V) exp(F))`` are provided:

* ``"flow"`` integrates ``dF/dt = hbar (V F + 1/2 sum V_ij dF/di dF/dj)``
  coefficient by coefficient in ``t``;
* ``"exp"`` exponentiates ``F`` in the weight-truncated algebra, applies the
  operator exponential term by term and takes the logarithm.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import TruncationOverflow
from .feynman import CorrelatorTable, vertex_correlator
from .genring import Gauge, GenPoly, modified, propagators
from .graphs import StableGraph, aut_order, canonical
from .ifunction import TargetSpec
from .rational import Q

XY = ("x", "y")
XYABC = ("x", "y", "a", "b", "c")


class Potential:
    __slots__ = ("vars", "G", "W", "terms")

    def __init__(self, vars: Sequence[str], G: int | None, W: int, terms: Mapping | None = None):
        self.vars = tuple(vars)
        self.G = G
        self.W = W
        self.terms: dict = {}
        if terms:
            for (h, exps), c in terms.items():
                if c and self.in_range(h, exps):
                    self.terms[(h, tuple(exps))] = c

    def in_range(self, h: int, exps) -> bool:
        if self.G is not None and h > self.G - 1:
            return False
        return 2 * h + sum(exps) <= self.W

    def _new(self, terms: dict) -> "Potential":
        out = Potential.__new__(Potential)
        out.vars, out.G, out.W = self.vars, self.G, self.W
        out.terms = terms
        return out

    def empty(self) -> "Potential":
        return self._new({})

    @classmethod
    def one(cls, vars, G, W) -> "Potential":
        return cls(vars, G, W, {(0, (0,) * len(vars)): GenPoly.one()})

    # -- algebra ------------------------------------------------------------
    def _check(self, other: "Potential"):
        if other.vars != self.vars or other.W != self.W or other.G != self.G:
            raise ValueError("potentials have different variables or truncation")

    def __add__(self, other: "Potential") -> "Potential":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out[k] + c if k in out else c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return self._new(out)

    def __neg__(self) -> "Potential":
        return self._new({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "Potential") -> "Potential":
        return self + (-other)

    def scale(self, c) -> "Potential":
        """Multiply every coefficient by a rational or a :class:`GenPoly`."""
        out = {}
        for k, v in self.terms.items():
            w = v * c
            if w:
                out[k] = w
        return self._new(out)

    def __mul__(self, other: "Potential") -> "Potential":
        self._check(other)
        out: dict = {}
        for (h1, e1), c1 in self.terms.items():
            w1 = 2 * h1 + sum(e1)
            for (h2, e2), c2 in other.terms.items():
                h = h1 + h2
                if self.G is not None and h > self.G - 1:
                    continue
                if w1 + 2 * h2 + sum(e2) > self.W:
                    continue
                key = (h, tuple(a + b for a, b in zip(e1, e2)))
                out[key] = out[key] + c1 * c2 if key in out else c1 * c2
        return self._new({k: v for k, v in out.items() if v})

    def shift_hbar(self, k: int = 1) -> "Potential":
        return self._new({(h + k, e): c for (h, e), c in self.terms.items() if self.in_range(h + k, e)})

    def partial(self, var: str) -> "Potential":
        i = self.vars.index(var)
        out = {}
        for (h, e), c in self.terms.items():
            if e[i]:
                ne = e[:i] + (e[i] - 1,) + e[i + 1:]
                out[(h, ne)] = c * e[i]
        return self._new(out)

    def times_var(self, var: str) -> "Potential":
        i = self.vars.index(var)
        out = {}
        for (h, e), c in self.terms.items():
            ne = e[:i] + (e[i] + 1,) + e[i + 1:]
            if self.in_range(h, ne):
                out[(h, ne)] = c
        return self._new(out)

    def restrict_zero(self, zero_vars: Sequence[str]) -> "Potential":
        """Set the listed variables to zero (they stay in the variable list)."""
        idx = [self.vars.index(v) for v in zero_vars]
        return self._new({k: c for k, c in self.terms.items() if not any(k[1][i] for i in idx)})

    def drop_vars(self, names: Sequence[str]) -> "Potential":
        """Set ``names`` to zero and remove them from the variable list."""
        keep = [i for i, v in enumerate(self.vars) if v not in names]
        out = Potential(tuple(self.vars[i] for i in keep), self.G, self.W)
        for (h, e), c in self.restrict_zero(names).terms.items():
            out.terms[(h, tuple(e[i] for i in keep))] = c
        return out

    def extend_vars(self, new_vars: Sequence[str]) -> "Potential":
        pos = {v: i for i, v in enumerate(new_vars)}
        out = Potential(tuple(new_vars), self.G, self.W)
        for (h, e), c in self.terms.items():
            ne = [0] * len(new_vars)
            for v, k in zip(self.vars, e):
                ne[pos[v]] = k
            out.terms[(h, tuple(ne))] = c
        return out

    def filter_genus(self, G: int) -> "Potential":
        return Potential(self.vars, G, self.W, {k: c for k, c in self.terms.items() if k[0] <= G - 1})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, Potential):
            return NotImplemented
        return (self.vars, self.G, self.W, self.terms) == (other.vars, other.G, other.W, other.terms)

    def __repr__(self) -> str:
        return f"Potential(vars={self.vars}, G={self.G}, W={self.W}, terms={len(self.terms)})"

    # -- correlator view ----------------------------------------------------
    def coefficient(self, g: int, exps) -> GenPoly:
        return self.terms.get((g - 1, tuple(exps)), GenPoly.zero())

    def correlator(self, g: int, exps) -> GenPoly:
        """Coefficient times ``prod exps_i!``: the symmetric correlator."""
        f = 1
        for e in exps:
            f *= math.factorial(e)
        return self.coefficient(g, exps) * f

    def min_weight(self) -> int:
        return min((2 * h + sum(e) for h, e in self.terms), default=self.W + 1)

    def first_difference(self, other: "Potential"):
        """The first key (in sorted order) where two potentials differ, or ``None``."""
        for key in sorted(set(self.terms) | set(other.terms)):
            a = self.terms.get(key, GenPoly.zero())
            b = other.terms.get(key, GenPoly.zero())
            if a != b:
                return key, a, b
        return None


# ---------------------------------------------------------------------------
# exponential and logarithm in the weight-truncated algebra


def exp_potential(F: Potential) -> Potential:
    if F.min_weight() < 1:
        raise TruncationOverflow("exp needs every term to have positive weight")
    result = Potential.one(F.vars, F.G, F.W)
    term = Potential.one(F.vars, F.G, F.W)
    for k in range(1, F.W + 1):
        term = (term * F).scale(Q(1, k))
        if term.is_zero():
            break
        result = result + term
    return result


def log_potential(Z: Potential) -> Potential:
    unit = Potential.one(Z.vars, Z.G, Z.W)
    U = Z - unit
    if U.min_weight() < 1:
        raise TruncationOverflow("log needs the weight-zero part to be exactly 1")
    result = Z.empty()
    power = unit
    for k in range(1, Z.W + 1):
        power = power * U
        if power.is_zero():
            break
        result = result + power.scale(Q((-1) ** (k + 1), k))
    return result


# ---------------------------------------------------------------------------
# operators


@dataclass(frozen=True)
class QuadOperator:
    """``1/2 sum_ij V_ij d_i d_j + sum_i b_i d_i`` with symmetric ``V``.

    ``second`` maps unordered pairs ``(i, j)`` (variable names, ``i <= j`` in
    variable order) to ``V_ij``; ``first`` maps a variable to ``b_i``.
    """

    vars: tuple
    second: Mapping = field(default_factory=dict)
    first: Mapping = field(default_factory=dict)

    def __post_init__(self):
        norm = {}
        for (i, j), c in dict(self.second).items():
            a, b = sorted((i, j), key=self.vars.index)
            norm[(a, b)] = norm.get((a, b), GenPoly.zero()) + c
        object.__setattr__(self, "second", {k: v for k, v in norm.items() if v})
        object.__setattr__(self, "first", {k: v for k, v in dict(self.first).items() if v})

    def __add__(self, other: "QuadOperator") -> "QuadOperator":
        second = dict(self.second)
        for k, v in other.second.items():
            second[k] = second.get(k, GenPoly.zero()) + v
        first = dict(self.first)
        for k, v in other.first.items():
            first[k] = first.get(k, GenPoly.zero()) + v
        return QuadOperator(self.vars, second, first)

    def is_zero(self) -> bool:
        return not self.second and not self.first

    def apply(self, Z: Potential) -> Potential:
        """Apply the operator (without any power of ``hbar``)."""
        out = Z.empty()
        for (i, j), c in self.second.items():
            d = Z.partial(i).partial(j)
            out = out + d.scale(c if i != j else c * Q(1, 2))
        for i, c in self.first.items():
            out = out + Z.partial(i).scale(c)
        return out


def apply_quad_exp(V: QuadOperator, F: Potential, method: str = "flow") -> Potential:
    """``log(exp(hbar V) exp(F))`` truncated to the range of ``F``."""
    if V.vars != F.vars:
        raise ValueError("operator and potential use different variables")
    if V.is_zero():
        return F
    if method == "flow":
        return _apply_flow(V, F)
    if method == "exp":
        return _apply_exp(V, F)
    raise ValueError(f"unknown method {method!r}")


def _apply_flow(V: QuadOperator, F: Potential) -> Potential:
    layers = [F]
    derivs = [{v: F.partial(v) for v in F.vars}]
    total = F
    k = 0
    while True:
        cur = layers[k]
        acc = V.apply(cur)
        for (i, j), c in V.second.items():
            quad = F.empty()
            for a in range(k + 1):
                quad = quad + derivs[a][i] * derivs[k - a][j]
            acc = acc + quad.scale(c if i != j else c * Q(1, 2))
        nxt = acc.shift_hbar(1).scale(Q(1, k + 1))
        if nxt.is_zero():
            break
        layers.append(nxt)
        derivs.append({v: nxt.partial(v) for v in F.vars})
        total = total + nxt
        k += 1
        if k > 4 * (F.W + (F.G or 0)) + 8:
            raise TruncationOverflow("flow did not terminate within the truncation")
    return total


def _apply_exp(V: QuadOperator, F: Potential) -> Potential:
    # e^F needs negative hbar powers, so the genus cap is lifted until the end
    uncapped = Potential(F.vars, None, F.W, F.terms)
    Z = exp_potential(uncapped)
    total = Z
    term = Z
    for k in range(1, 4 * F.W + 8):
        term = V.apply(term).shift_hbar(1).scale(Q(1, k))
        if term.is_zero():
            break
        total = total + term
    return Potential(F.vars, F.G, F.W, log_potential(total).terms)


# ---------------------------------------------------------------------------
# the B-model and A-model potentials


def weight_bound(G: int, M: int) -> int:
    return 2 * G - 2 + M


def master_potential_B(table: CorrelatorTable, spec: TargetSpec, G: int, M: int) -> Potential:
    """``sum hbar^{g-1} x^m y^n/(m! n!) P_{g,m,n}`` within the truncation range."""
    W = weight_bound(G, M)
    P = Potential(XY, G, W)
    for g in range(G + 1):
        for N in range(W - 2 * g + 2 + 1):
            if 2 * g - 2 + N <= 0:
                continue
            for m in range(N + 1):
                n = N - m
                c = vertex_correlator(g, m, n, table, spec)
                if c:
                    P.terms[(g - 1, (m, n))] = c / (math.factorial(m) * math.factorial(n))
    return P


def tilde_potential_B(table: CorrelatorTable, gauge: Gauge, spec: TargetSpec, G: int, M: int) -> Potential:
    """``P^B(x, y - E_psi x)``."""
    e_psi = propagators(spec, gauge).E_psi
    W = weight_bound(G, M)
    P = Potential(XY, G, W)
    for g in range(G + 1):
        for N in range(W - 2 * g + 2 + 1):
            if 2 * g - 2 + N <= 0:
                continue
            for m in range(N + 1):
                n = N - m
                acc = GenPoly.zero()
                for j in range(m + 1):
                    c = vertex_correlator(g, m - j, n + j, table, spec)
                    if c:
                        acc = acc + c * (math.comb(m, j) * (-e_psi) ** j)
                if acc:
                    P.terms[(g - 1, (m, n))] = acc / (math.factorial(m) * math.factorial(n))
    return P


def log_one_minus_y(vars: Sequence[str], G: int, W: int) -> Potential:
    """``-log(1 - y)`` at genus one."""
    out = Potential(vars, G, W)
    iy = list(vars).index("y")
    for n in range(1, W + 1):
        e = [0] * len(vars)
        e[iy] = n
        if out.in_range(0, e):
            out.terms[(0, tuple(e))] = GenPoly.const(Q(1, n))
    return out


def vb_operator(spec: TargetSpec, gauge: Gauge = Gauge(), vars: Sequence[str] = XY) -> QuadOperator:
    m = modified(spec, gauge)
    return QuadOperator(tuple(vars), {("x", "x"): m.E1, ("x", "y"): m.E2, ("y", "y"): m.E3})


def vextra_operator(spec: TargetSpec, gauge: Gauge = Gauge()) -> QuadOperator:
    """``-E2 d_a d_c - E3 d_b d_c`` (tilded propagators)."""
    m = modified(spec, gauge)
    return QuadOperator(XYABC, {("a", "c"): -m.E2, ("b", "c"): -m.E3})


def f_B_operator(table, gauge, spec, G: int, M: int, method: str = "flow") -> Potential:
    return apply_quad_exp(vb_operator(spec, gauge), tilde_potential_B(table, gauge, spec, G, M), method)


def string_extension(F: Potential) -> Potential:
    """Flow ``F`` along ``c (1-y)^{-1} (a d_x + b d_y)``.

    Returns ``sum_n c^n L^n F / n!`` with ``L = (1-y)^{-1}(a d_x + b d_y)``,
    the unique solution of ``d_c P = L P`` with ``P|_{c=0} = F``.  ``F`` may
    depend on ``x`` and ``y`` only.
    """
    Fx = F.extend_vars(XYABC) if F.vars != XYABC else F
    for v in ("a", "b", "c"):
        if any(e[XYABC.index(v)] for _, e in Fx.terms):
            raise ValueError("string extension needs a potential free of a, b, c")
    total = Fx
    term = Fx
    for n in range(1, Fx.W + 1):
        term = string_operator(term).times_var("c").scale(Q(1, n))
        if term.is_zero():
            break
        total = total + term
    return total


def string_operator(F: Potential) -> Potential:
    """``L F = (1-y)^{-1} (a F_x + b F_y)`` with the geometric series truncated."""
    base = F.partial("x").times_var("a") + F.partial("y").times_var("b")
    out = base
    cur = base
    while True:
        cur = cur.times_var("y")
        if cur.is_zero():
            break
        out = out + cur
    return out


def f_A_operator(table, gauge, spec, G: int, M: int, method: str = "flow") -> Potential:
    W = weight_bound(G, M)
    pa = tilde_potential_B(table, gauge, spec, G, M) + log_one_minus_y(XY, G, W)
    ext = string_extension(pa)
    V = vb_operator(spec, gauge, XYABC) + vextra_operator(spec, gauge)
    out = apply_quad_exp(V, ext, method)
    return out.drop_vars(("a", "b", "c"))


# ---------------------------------------------------------------------------
# checks


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name}" + (f": {self.detail}" if self.detail else "")


def _describe(diff) -> str:
    if diff is None:
        return ""
    (h, e), a, b = diff
    return f"first mismatch at hbar^{h} {e}: {a} != {b}"


def thm45_check(table, gauge, spec, G: int = 2, M: int = 4) -> CheckResult:
    W = weight_bound(G, M)
    fa = f_A_operator(table, gauge, spec, G, M)
    fb = f_B_operator(table, gauge, spec, G, M) + log_one_minus_y(XY, G, W)
    diff = fa.first_difference(fb)
    return CheckResult(f"thm45 Z{spec.k} (G,M)=({G},{M})", diff is None, _describe(diff))


def verify_conjugation(gauge, spec, orders=(2, 4)) -> CheckResult:
    """``exp(-hbar V) (1-y) exp(hbar V) = (1-y) + hbar (E2 d_x + E3 d_y)``.

    Both sides are applied to every monomial ``x^i y^j`` with ``i + j <= M``.
    The operator exponentials terminate on polynomials.
    """
    G, M = orders
    V = vb_operator(spec, gauge)
    m = modified(spec, gauge)
    W = 2 * (M + 2) + 2 * G
    for i in range(M + 1):
        for j in range(M + 1 - i):
            phi = Potential(XY, None, W, {(0, (i, j)): GenPoly.one()})
            lhs = _op_exp(V, _one_minus_y_times(_op_exp(V, phi, 1)), -1)
            rhs = phi - phi.times_var("y")
            rhs = rhs + (phi.partial("x").scale(m.E2) + phi.partial("y").scale(m.E3)).shift_hbar(1)
            diff = lhs.first_difference(rhs)
            if diff is not None:
                return CheckResult(f"conjugation Z{spec.k}", False, f"on x^{i} y^{j}: " + _describe(diff))
    return CheckResult(f"conjugation Z{spec.k}", True)


def _op_exp(V: QuadOperator, phi: Potential, sign: int) -> Potential:
    """``exp(sign * hbar V) phi`` for a polynomial ``phi``."""
    total = phi
    term = phi
    for k in range(1, phi.W + 2):
        term = V.apply(term).shift_hbar(1).scale(Q(sign, k))
        if term.is_zero():
            break
        total = total + term
    return total


def _one_minus_y_times(P: Potential) -> Potential:
    return P - P.times_var("y")



def loop_sum_check(gauge, spec, x_order: int = 6) -> CheckResult:
    """Compare the genus-zero cycle graph sum with ``log(1 + E_psi x)``.

    Cycle graphs with ``N`` labelled legs are built from set partitions of the
    legs into cyclically arranged vertices.  Each edge carries
    ``E_psi (phi0 (x) phi2 + phi2 (x) phi0)``; an x-leg carries
    ``phi1 - E_psi phi0 psi``.  A vertex with one ``phi0`` end, one ``phi2``
    end, one ``phi1`` and ``n`` copies of ``phi0 psi`` contributes ``n!``; any
    other vertex contributes zero.
    """
    if x_order < 1:
        raise ValueError("x_order must be at least 1")
    e_psi = propagators(spec, gauge).E_psi
    for N in range(1, x_order + 1):
        graph_sum = GenPoly.zero()
        for G in _cycle_graphs(N):
            graph_sum = graph_sum + _loop_contribution(G, e_psi) / aut_order(G)
        coeff = graph_sum / math.factorial(N)
        expected = e_psi**N * Q((-1) ** (N + 1), N)
        if coeff != expected:
            return CheckResult(f"loop sum Z{spec.k}", False, f"x^{N}: {coeff} != {expected}")
    return CheckResult(f"loop sum Z{spec.k} to x^{x_order}", True)


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def _cycle_graphs(N: int) -> list:
    seen = set()
    out = []
    for blocks in _set_partitions(list(range(N))):
        m = len(blocks)
        for order in itertools.permutations(range(1, m)):
            cyc = (0,) + order
            legs = [0] * N
            for pos, b in enumerate(cyc):
                for leg in blocks[b]:
                    legs[leg] = pos
            edges = tuple(sorted(tuple(sorted((p, (p + 1) % m))) for p in range(m)))
            G = canonical(StableGraph((0,) * m, edges, tuple(legs)))
            if G not in seen:
                seen.add(G)
                out.append(G)
    return out


def _loop_contribution(G: StableGraph, e_psi: GenPoly) -> GenPoly:
    total = GenPoly.zero()
    nv = G.n_vertices
    legs_at = [[l for l, w in enumerate(G.legs) if w == v] for v in range(nv)]
    for orient in itertools.product((0, 1), repeat=G.n_edges):
        zeros = [0] * nv
        twos = [0] * nv
        for (i, j), o in zip(G.edges, orient):
            a, b = (i, j) if o == 0 else (j, i)
            zeros[a] += 1
            twos[b] += 1
        if any(zeros[v] != 1 or twos[v] != 1 for v in range(nv)):
            continue
        # one phi1 per vertex, chosen among its legs; the rest are dilatons
        weight = GenPoly.one()
        for v in range(nv):
            k = len(legs_at[v])
            if k == 0:
                weight = GenPoly.zero()
                break
            n = k - 1
            weight = weight * (k * math.factorial(n)) * (-e_psi) ** n
        total = total + weight * e_psi**G.n_edges
    return total
