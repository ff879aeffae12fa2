"""B-model Feynman rule as generator-ring valued graph sums.

Vertex insertions are ``phi1`` and ``phi0 psi``.  A vertex of genus ``g``
with ``m`` insertions of the first kind and ``n`` of the second contributes
the correlator ``P_{g,m,n}``.  Legs carry ``phi1 - E_psi phi0 psi`` (x-legs)
or ``phi0 psi`` (y-legs), and edges carry the symmetric bivector with
coefficients ``E_phiphi``, ``E_phipsi``, ``E_phipsi``, ``E_psipsi``.

The A-model R-matrix and edge bivector are also built here.  They are used
for structural checks only.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .errors import MissingCorrelator, UnstablePair
from .genring import A, B, X, Gauge, GenPoly, derive, propagators
from .graphs import StableGraph, aut_order, enumerate_graphs
from .ifunction import TargetSpec
from .rational import Q

X_LEG = "x"
Y_LEG = "y"


def recursion_step(p: GenPoly, g: int, m: int, spec: TargetSpec) -> GenPoly:
    """``P_{g,m+1} = (D + (g-1)(2B+X) - m A) P_{g,m}``."""
    return derive(p, spec) + (g - 1) * (2 * B + X) * p - m * A * p


class CorrelatorTable:
    """Stores ``P_{g,m}``.

    Each genus has one base entry ``P_{g,m0}``; the others are generated on
    demand with :func:`recursion_step`.  Genus 0 is seeded with
    ``P_{0,3} = 1``.
    """

    def __init__(self, spec: TargetSpec):
        self.spec = spec
        self._base: dict = {0: 3}
        self._cache: dict = {(0, 3): GenPoly.one()}

    def set_genus(self, g: int, m0: int, poly: GenPoly) -> None:
        if g == 0:
            raise ValueError("the genus-zero entries are fixed by P_{0,3} = 1")
        if 2 * g - 2 + m0 <= 0:
            raise UnstablePair(f"P_{{{g},{m0}}} is not defined")
        self._base[g] = m0
        for key in [k for k in self._cache if k[0] == g]:
            del self._cache[key]
        self._cache[(g, m0)] = poly

    def has_genus(self, g: int) -> bool:
        return g in self._base

    def genera(self) -> list:
        return sorted(self._base)

    def get(self, g: int, m: int) -> GenPoly:
        key = (g, m)
        if key in self._cache:
            return self._cache[key]
        m0 = self._base.get(g)
        if m0 is None or m < m0:
            raise MissingCorrelator(f"P_{{{g},{m}}} is not available")
        p = self.get(g, m - 1)
        out = recursion_step(p, g, m - 1, self.spec)
        self._cache[key] = out
        return out

    def copy(self) -> "CorrelatorTable":
        new = CorrelatorTable(self.spec)
        new._base = dict(self._base)
        new._cache = dict(self._cache)
        return new


def falling(x: int, n: int) -> int:
    out = 1
    for i in range(n):
        out *= x - i
    return out


def vertex_correlator(g: int, m: int, n: int, table: CorrelatorTable, spec: TargetSpec) -> GenPoly:
    if 2 * g - 2 + m + n <= 0:
        raise UnstablePair(f"vertex ({g}, {m}, {n}) is unstable")
    if g == 0 and m < 3:
        return GenPoly.zero()
    if (g, m) == (1, 0):
        return GenPoly.const(math.factorial(n - 1) * (Q(spec.chi, 24) - 1))
    f = falling(2 * g + m + n - 3, n)
    if f == 0:
        return GenPoly.zero()
    return table.get(g, m) * f


# ---------------------------------------------------------------------------
# edge data

PHI1 = (1, 0)
PHI0PSI = (0, 1)


def edge_bivector_B(spec: TargetSpec, gauge: Gauge = Gauge()) -> dict:
    """Slot pair ``((a, s), (b, t))`` meaning ``phi_a psi^s (x) phi_b psi^t``."""
    p = propagators(spec, gauge)
    return {
        (PHI1, PHI1): p.E_phiphi,
        (PHI1, PHI0PSI): p.E_phipsi,
        (PHI0PSI, PHI1): p.E_phipsi,
        (PHI0PSI, PHI0PSI): p.E_psipsi,
    }


def edge_bivector_A(spec: TargetSpec, gauge: Gauge = Gauge()) -> dict:
    p = propagators(spec, gauge)
    out = edge_bivector_B(spec, gauge)
    out.update({
        ((0, 0), (2, 0)): p.E_psi,
        ((2, 0), (0, 0)): p.E_psi,
        ((0, 0), (1, 1)): p.E_1phipsi,
        ((1, 1), (0, 0)): p.E_1phipsi,
        ((0, 0), (0, 2)): p.E_1psi2,
        ((0, 2), (0, 0)): p.E_1psi2,
    })
    return out


# 4x4 matrices over GenPoly[z]; an entry is a dict {z power: GenPoly}

def _zmat(entries: dict) -> list:
    M = [[{} for _ in range(4)] for _ in range(4)]
    for (i, j), zp in entries.items():
        M[i][j] = {e: c for e, c in zp.items() if c}
    return M


def zmat_identity() -> list:
    return _zmat({(i, i): {0: GenPoly.one()} for i in range(4)})


def zmat_sub(M: list, N: list) -> list:
    out = []
    for i in range(4):
        row = []
        for j in range(4):
            d = dict(M[i][j])
            for e, c in N[i][j].items():
                d[e] = d.get(e, GenPoly.zero()) - c
            row.append({e: c for e, c in d.items() if c})
        out.append(row)
    return out


def zmat_mul(M: list, N: list) -> list:
    out = []
    for i in range(4):
        row = []
        for j in range(4):
            d: dict = {}
            for k in range(4):
                for e1, c1 in M[i][k].items():
                    for e2, c2 in N[k][j].items():
                        d[e1 + e2] = d.get(e1 + e2, GenPoly.zero()) + c1 * c2
            row.append({e: c for e, c in d.items() if c})
        out.append(row)
    return out


def r_matrix_A_inv(spec: TargetSpec, gauge: Gauge = Gauge()) -> list:
    p = propagators(spec, gauge)
    N = _zmat({
        (0, 1): {1: p.E_psi},
        (0, 2): {2: p.E_phipsi},
        (0, 3): {3: p.E_1psi2},
        (1, 2): {1: p.E_phiphi},
        (1, 3): {2: p.E_1phipsi},
        (2, 3): {1: p.E_psi},
    })
    return zmat_sub(zmat_identity(), N)


def gauge_matrix_inv(gauge: Gauge) -> list:
    c11, c12, c2, c3 = (gauge.poly(n) for n in ("c11", "c12", "c2", "c3"))
    # The (2, 3) entry carries one power of z; without it the factorization
    # R^{A,G}(z)^{-1} = R^A(z)^{-1} G(z)^{-1} fails.
    N = _zmat({
        (0, 1): {1: c11},
        (0, 2): {2: c2},
        (0, 3): {3: -(c11 * c2 + c3)},
        (1, 2): {1: c12},
        (1, 3): {2: -(c11 * c12 + c2)},
        (2, 3): {1: c11},
    })
    return zmat_sub(zmat_identity(), N)


def bivector_from_r_matrix(M: list) -> dict:
    """``sum_i (phi_i (x) phi_{3-i} - R(psi)^{-1} phi_i (x) R(psi')^{-1} phi_{3-i}) / (psi + psi')``.

    ``M`` is ``R(z)^{-1}`` acting on columns.  Returns the slot dictionary in
    the format of :func:`edge_bivector_A`; raises ``ArithmeticError`` if the
    numerator is not divisible by ``psi + psi'``.
    """
    num: dict = {}

    def add(key, c):
        num[key] = num.get(key, GenPoly.zero()) + c

    for i in range(4):
        add((i, 0, 3 - i, 0), GenPoly.one())
        for a in range(4):
            for s, ca in M[a][i].items():
                for b in range(4):
                    for t, cb in M[b][3 - i].items():
                        add((a, s, b, t), -(ca * cb))
    by_pair: dict = {}
    for (a, s, b, t), c in num.items():
        if c:
            by_pair.setdefault((a, b), {})[(s, t)] = c
    out = {}
    for (a, b), poly in by_pair.items():
        quot: dict = {}
        rem = dict(poly)
        while True:
            keys = [k for k, c in rem.items() if c and k[0] > 0]
            if not keys:
                break
            s, t = max(keys)
            c = rem.pop((s, t))
            quot[(s - 1, t)] = quot.get((s - 1, t), GenPoly.zero()) + c
            rem[(s - 1, t + 1)] = rem.get((s - 1, t + 1), GenPoly.zero()) - c
        if any(c for c in rem.values()):
            raise ArithmeticError("numerator is not divisible by psi + psi'")
        for (s, t), c in quot.items():
            if c:
                out[((a, s), (b, t))] = c
    return out


# ---------------------------------------------------------------------------
# graph contributions


def _vertex_caps(G: StableGraph) -> list:
    """Largest admissible ``n_v`` at each vertex, used to prune the expansion."""
    caps = []
    for v, g in enumerate(G.genera):
        val = G.valence(v)
        caps.append(val - 3 if g == 0 else val)
    return caps


def graph_contribution_B(
    G: StableGraph,
    leg_kinds: Sequence[str],
    table: CorrelatorTable,
    gauge: Gauge,
    spec: TargetSpec,
    divide: bool = True,
) -> GenPoly:
    """Contribution of ``G``, divided by ``|Aut G|`` unless ``divide`` is false."""
    if len(leg_kinds) != len(G.legs):
        raise ValueError("one kind per leg is required")
    prop = propagators(spec, gauge)
    nv = G.n_vertices
    caps = _vertex_caps(G)
    states: dict = {(0,) * (2 * nv): GenPoly.one()}

    def push(out, state, weight, bumps):
        s = list(state)
        for idx in bumps:
            s[idx] += 1
        for v in range(nv):
            if s[2 * v + 1] > caps[v]:
                return
        key = tuple(s)
        out[key] = out[key] + weight if key in out else weight

    minus_e_psi = -prop.E_psi
    for v, kind in zip(G.legs, leg_kinds):
        nxt: dict = {}
        for st, w in states.items():
            if kind == X_LEG:
                push(nxt, st, w, (2 * v,))
                push(nxt, st, w * minus_e_psi, (2 * v + 1,))
            elif kind == Y_LEG:
                push(nxt, st, w, (2 * v + 1,))
            else:
                raise ValueError(f"unknown leg kind {kind!r}")
        states = nxt

    slots = edge_bivector_B(spec, gauge)
    for i, j in G.edges:
        nxt = {}
        for st, w in states.items():
            for (si, sj), coeff in slots.items():
                bi = 2 * i + (si == PHI0PSI)
                bj = 2 * j + (sj == PHI0PSI)
                push(nxt, st, w * coeff, (bi, bj))
        states = nxt

    total = GenPoly.zero()
    for st, w in sorted(states.items()):
        prod = w
        for v, g in enumerate(G.genera):
            c = vertex_correlator(g, st[2 * v], st[2 * v + 1], table, spec)
            if not c:
                prod = None
                break
            prod = prod * c
        if prod is not None:
            total = total + prod
    if divide:
        total = total / aut_order(G)
    return total


def leg_kinds_for(m: int, n: int) -> tuple:
    return (X_LEG,) * m + (Y_LEG,) * n


def _contribution_job(args):
    G, kinds, table, gauge, spec = args
    return graph_contribution_B(G, kinds, table, gauge, spec)


def pmap_contributions(graphs, kinds, table, gauge, spec, jobs: int = 1) -> list:
    """Per-graph contributions in input order; ``jobs > 1`` uses processes."""
    args = [(G, kinds, table, gauge, spec) for G in graphs]
    if jobs <= 1 or len(args) <= 1:
        return [_contribution_job(a) for a in args]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(_contribution_job, args, chunksize=1))


def feynman_sum_B(
    g: int,
    m: int,
    n: int,
    table: CorrelatorTable,
    gauge: Gauge,
    spec: TargetSpec,
    jobs: int = 1,
) -> GenPoly:
    graphs = enumerate_graphs(g, m + n)
    parts = pmap_contributions(graphs, leg_kinds_for(m, n), table, gauge, spec, jobs)
    total = GenPoly.zero()
    for c in parts:
        total = total + c
    return total


def non_leading_graphs(g: int) -> tuple:
    return tuple(G for G in enumerate_graphs(g, 0) if G.n_vertices > 1 or G.n_edges > 0)


def leading_decomposition(
    g: int,
    gauge: Gauge,
    spec: TargetSpec,
    table: CorrelatorTable,
    jobs: int = 1,
) -> GenPoly:
    """Sum of ``Cont/|Aut|`` over all genus-``g`` graphs except the one-vertex graph."""
    parts = pmap_contributions(non_leading_graphs(g), (), table, gauge, spec, jobs)
    total = GenPoly.zero()
    for c in parts:
        total = total + c
    return total


@dataclass(frozen=True)
class ContributionRow:
    graph: StableGraph
    aut: int
    value: GenPoly

    def to_json(self) -> dict:
        return {"graph": self.graph.to_text(), "aut": self.aut, "contribution": str(self.value)}


def contribution_table(
    g: int,
    m: int,
    n: int,
    table: CorrelatorTable,
    gauge: Gauge,
    spec: TargetSpec,
    jobs: int = 1,
) -> list:
    graphs = enumerate_graphs(g, m + n)
    parts = pmap_contributions(graphs, leg_kinds_for(m, n), table, gauge, spec, jobs)
    return [ContributionRow(G, aut_order(G), c) for G, c in zip(graphs, parts)]


__all__ = [
    "CorrelatorTable",
    "recursion_step",
    "vertex_correlator",
    "edge_bivector_A",
    "edge_bivector_B",
    "r_matrix_A_inv",
    "gauge_matrix_inv",
    "bivector_from_r_matrix",
    "graph_contribution_B",
    "feynman_sum_B",
    "leading_decomposition",
    "contribution_table",
]
