"""Stable graphs: enumeration up to isomorphism and automorphism orders.

A graph is stored in canonical form: vertices carry genera, edges are sorted
vertex pairs ``(i, j)`` with ``i <= j`` (``i == j`` is a loop), and ``legs[l]``
is the vertex carrying leg ``l + 1``.  Isomorphisms permute vertices and
half-edges but fix every leg.

Enumeration starts from the one-vertex graph and degenerates one edge at a
time, either by turning a unit of vertex genus into a loop or by splitting a
vertex in two along a new edge.  Every stable graph with ``e`` edges arises
this way from one with ``e - 1`` edges (contract any edge), so the search is
complete.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import lru_cache

from .errors import UnstablePair


@dataclass(frozen=True)
class StableGraph:
    genera: tuple
    edges: tuple
    legs: tuple = ()

    @property
    def n_vertices(self) -> int:
        return len(self.genera)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def genus(self) -> int:
        return sum(self.genera) + self.n_edges - self.n_vertices + 1

    def valence(self, v: int) -> int:
        """Half-edges plus legs at ``v``; a loop counts twice."""
        half = sum((i == v) + (j == v) for i, j in self.edges)
        return half + sum(1 for w in self.legs if w == v)

    def to_text(self) -> str:
        gs = ",".join(str(g) for g in self.genera)
        es = ",".join(f"({i},{j})" for i, j in self.edges)
        ls = ",".join(str(v) for v in self.legs)
        return f"V:[{gs}] E:[{es}] L:[{ls}]"

    __str__ = to_text

    @classmethod
    def from_text(cls, text: str) -> "StableGraph":
        m = re.fullmatch(r"\s*V:\[([^\]]*)\]\s+E:\[([^\]]*)\]\s+L:\[([^\]]*)\]\s*", text)
        if not m:
            raise ValueError(f"not a graph: {text!r}")

        def ints(s):
            return tuple(int(t) for t in s.split(",") if t.strip())

        edges = tuple(
            tuple(sorted((int(a), int(b))))
            for a, b in re.findall(r"\((\d+),(\d+)\)", m.group(2))
        )
        return cls(ints(m.group(1)), tuple(sorted(edges)), ints(m.group(3)))


def validate(G: StableGraph) -> None:
    """Raise ``ValueError`` unless ``G`` is a connected stable graph."""
    nv = G.n_vertices
    if nv == 0:
        raise ValueError("graph has no vertices")
    for i, j in G.edges:
        if not (0 <= i <= j < nv):
            raise ValueError(f"bad edge {(i, j)}")
    for v in G.legs:
        if not 0 <= v < nv:
            raise ValueError(f"leg on missing vertex {v}")
    if any(g < 0 for g in G.genera):
        raise ValueError("negative vertex genus")
    for v, g in enumerate(G.genera):
        if 2 * g - 2 + G.valence(v) <= 0:
            raise ValueError(f"vertex {v} is unstable")
    seen = {0}
    frontier = [0]
    while frontier:
        v = frontier.pop()
        for i, j in G.edges:
            for a, b in ((i, j), (j, i)):
                if a == v and b not in seen:
                    seen.add(b)
                    frontier.append(b)
    if len(seen) != nv:
        raise ValueError("graph is disconnected")


# ---------------------------------------------------------------------------
# canonical form


def _relabel(G: StableGraph, perm) -> tuple:
    """Encoding of ``G`` after sending old vertex ``v`` to ``perm[v]``."""
    genera = [0] * len(perm)
    for v, w in enumerate(perm):
        genera[w] = G.genera[v]
    edges = tuple(sorted(tuple(sorted((perm[i], perm[j]))) for i, j in G.edges))
    legs = tuple(perm[v] for v in G.legs)
    return (tuple(genera), edges, legs)


def _vertex_invariant(G: StableGraph, v: int) -> tuple:
    loops = sum(1 for i, j in G.edges if i == j == v)
    legs = tuple(l for l, w in enumerate(G.legs) if w == v)
    return (G.genera[v], G.valence(v), loops, legs)


def _block_perms(G: StableGraph):
    """Vertex permutations that respect the invariant ordering.

    Yields maps ``old -> new`` where vertices are placed in blocks by sorted
    invariant and permuted freely inside each block.
    """
    order = sorted(range(G.n_vertices), key=lambda v: _vertex_invariant(G, v))
    blocks = [list(grp) for _, grp in itertools.groupby(order, key=lambda v: _vertex_invariant(G, v))]
    offsets = []
    pos = 0
    for b in blocks:
        offsets.append(pos)
        pos += len(b)
    for choice in itertools.product(*(itertools.permutations(b) for b in blocks)):
        perm = [0] * G.n_vertices
        for off, arrangement in zip(offsets, choice):
            for k, v in enumerate(arrangement):
                perm[v] = off + k
        yield perm


def canonical(G: StableGraph) -> StableGraph:
    best = min(_relabel(G, perm) for perm in _block_perms(G))
    return StableGraph(*best)


def aut_order(G: StableGraph) -> int:
    """Order of the automorphism group fixing every leg.

    Counts vertex permutations that preserve the graph, times permutations of
    parallel edges, times the half-edge flips of loops.
    """
    perms = list(_block_perms(G))
    # Two block permutations give the same encoding exactly when they differ
    # by a vertex automorphism, so count those matching a fixed reference.
    base = _relabel(G, perms[0])
    vertex_autos = sum(1 for perm in perms if _relabel(G, perm) == base)
    edge_factor = 1
    for (i, j), grp in itertools.groupby(sorted(G.edges)):
        mult = len(list(grp))
        edge_factor *= math.factorial(mult)
        if i == j:
            edge_factor *= 2**mult
    return vertex_autos * edge_factor


# ---------------------------------------------------------------------------
# enumeration


def _is_stable_vertex(g: int, valence: int) -> bool:
    return 2 * g - 2 + valence > 0


def _degenerations(G: StableGraph):
    nv = G.n_vertices
    for v in range(nv):
        if G.genera[v] >= 1:
            genera = list(G.genera)
            genera[v] -= 1
            yield StableGraph(tuple(genera), G.edges + ((v, v),), G.legs)

        # split v into v (side 0) and a new vertex nv (side 1)
        incident = [e for e, (i, j) in enumerate(G.edges) if v in (i, j)]
        leg_ids = [l for l, w in enumerate(G.legs) if w == v]
        options = []
        for e in incident:
            i, j = G.edges[e]
            if i == j:
                options.append(((v, v), (v, nv), (nv, nv)))
            else:
                other = j if i == v else i
                options.append(((other, v), (other, nv)))
        for g0 in range(G.genera[v] + 1):
            g1 = G.genera[v] - g0
            for edge_choice in itertools.product(*options):
                for leg_choice in itertools.product((v, nv), repeat=len(leg_ids)):
                    edges = list(G.edges)
                    for e, new in zip(incident, edge_choice):
                        edges[e] = tuple(sorted(new))
                    edges.append((v, nv))
                    legs = list(G.legs)
                    for l, w in zip(leg_ids, leg_choice):
                        legs[l] = w
                    H = StableGraph(G.genera[:v] + (g0,) + G.genera[v + 1:] + (g1,),
                                    tuple(sorted(edges)), tuple(legs))
                    if _is_stable_vertex(g0, H.valence(v)) and _is_stable_vertex(g1, H.valence(nv)):
                        yield H


@lru_cache(maxsize=None)
def enumerate_graphs(g: int, n: int) -> tuple:
    """All stable graphs of genus ``g`` with ``n`` legs, one per iso class.

    Ordered by edge count, then by canonical encoding.
    """
    if g < 0 or n < 0 or 2 * g - 2 + n <= 0:
        raise UnstablePair(f"(g, n) = ({g}, {n}) is not a stable pair")
    layer = {canonical(StableGraph((g,), (), (0,) * n))}
    result = []
    max_edges = 3 * g - 3 + n
    for _ in range(max_edges + 1):
        result.extend(sorted(layer, key=_relabel_key))
        nxt = set()
        for G in layer:
            for H in _degenerations(G):
                nxt.add(canonical(H))
        layer = nxt
        if not layer:
            break
    return tuple(result)


def _relabel_key(G: StableGraph):
    return (G.n_edges, G.genera, G.edges, G.legs)
