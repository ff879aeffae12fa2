"""Registry of identity checks run by ``gwfeynman verify``."""
from __future__ import annotations

import dataclasses
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

from .feynman import feynman_sum_B, non_leading_graphs, pmap_contributions
from .genring import (
    Gauge,
    X,
    a2_relation,
    b4_relation,
    closure_rules,
    derive,
    eval_hom,
    from_modified_basis,
    modified,
    to_modified_basis,
)
from .graphs import StableGraph, aut_order, canonical, enumerate_graphs
from .ifunction import TargetSpec, a_series, b_series, normalized_periods, y_series, yukawa
from .pipeline import AmbiguitySpec, degree0_constant, extract_invariants, hae2_operator, hae_check, run_pipeline
from .quantization import CheckResult, loop_sum_check, thm45_check, verify_conjugation
from .rational import Q
from .series import derive_D


@dataclass
class VerifyContext:
    """Shared state for one verification run; expensive pieces are built lazily."""

    spec: TargetSpec
    T: int = 30
    jobs: int = 1
    seed: int = 0
    n_gauges: int = 5
    thm45_orders: tuple = (2, 4)
    dmax: int = 8

    @cached_property
    def genus2(self):
        return run_pipeline(self.spec, 2, Gauge(), {2: AmbiguitySpec.symbolic(2)}, self.jobs)

    @cached_property
    def gauges(self) -> list:
        return random_gauges(self.n_gauges, self.seed)


def random_gauges(n: int, seed: int = 0) -> list:
    """``n`` gauges with small random rational coefficients, reproducible from ``seed``."""
    rng = random.Random(seed)

    def coeffs(deg):
        return tuple(Q(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(deg + 1))

    return [Gauge(coeffs(1), coeffs(1), coeffs(2), coeffs(3)) for _ in range(n)]


def _result(name: str, ok: bool, detail: str = "") -> CheckResult:
    return CheckResult(name, bool(ok), "" if ok else detail)


def _first_bad_order(lhs, rhs) -> str:
    for d in range(min(lhs.order, rhs.order) + 1):
        if lhs[d] != rhs[d]:
            return f"differs at q^{d}"
    return ""


# ---------------------------------------------------------------------------
# individual checks


def check_relations(ctx: VerifyContext) -> list:
    s, T = ctx.spec, ctx.T
    out = []
    for name, poly, series in (
        ("A2 relation", a2_relation(s), a_series(s, T, 2)),
        ("B4 relation", b4_relation(s), b_series(s, T, 4)),
    ):
        val = eval_hom(poly, s, T)
        out.append(_result(f"{name} {s.name} to q^{T}", val == series, _first_bad_order(val, series)))
    return out


def check_period_identity(ctx: VerifyContext) -> list:
    s, T = ctx.spec, ctx.T
    b = normalized_periods(s, T)
    lhs = b.I0 * b.I0 * b.I11 * b.I11 * b.I22
    rhs = y_series(s, T)
    return [_result(f"period identity {s.name} to q^{T}", lhs == rhs, _first_bad_order(lhs, rhs))]


def check_yukawa(ctx: VerifyContext) -> list:
    s = ctx.spec
    c0 = yukawa(s, ctx.T)[0]
    ok = c0 == s.p_k == 6 * s.a0
    return [_result(f"yukawa constant term {s.name}", ok, f"got {c0}, want {s.p_k}")]


def check_closure(ctx: VerifyContext) -> list:
    s, T = ctx.spec, ctx.T
    m = modified(s)
    rules = closure_rules(s)
    out = []
    for name in ("E1", "E2", "E3"):
        e = getattr(m, name)
        want = from_modified_basis(rules[name], s)
        poly_ok = derive(e, s) == want
        lhs, rhs = derive_D(eval_hom(e, s, T)), eval_hom(want, s, T)
        out.append(_result(f"closure D{name} {s.name} polynomial", poly_ok, "polynomial identity fails"))
        out.append(_result(f"closure D{name} {s.name} series to q^{T}", lhs == rhs, _first_bad_order(lhs, rhs)))
    return out


def check_genus1_feynman(ctx: VerifyContext) -> list:
    s = ctx.spec
    t = ctx.genus2.table
    val = feynman_sum_B(1, 1, 0, t, Gauge(), s, ctx.jobs)
    want = s.a1 - X / 12
    out = [_result(f"f^B_(1,1,0) {s.name} zero gauge", val == want, f"got {val}")]
    for i, gauge in enumerate(ctx.gauges):
        v = feynman_sum_B(1, 1, 0, t, gauge, s, ctx.jobs)
        ok = not any(v.involves(n) for n in ("A", "B", "B2", "B3")) and v.degree_in("X") <= 1
        out.append(_result(f"f^B_(1,1,0) {s.name} random gauge {i}", ok, f"got {v}"))
    return out


def check_graphs(ctx: VerifyContext) -> list:
    out = []
    for (g, n), want in (((0, 3), 1), ((1, 1), 2), ((2, 0), 7)):
        got = len(enumerate_graphs(g, n))
        out.append(_result(f"graph count ({g},{n})", got == want, f"got {got}, want {want}"))
    parts = [G.n_edges for G in enumerate_graphs(2, 0)]
    split = tuple(parts.count(e) for e in range(4))
    out.append(_result("graph edge partition (2,0)", split == (1, 2, 2, 2), f"got {split}"))
    theta = canonical(StableGraph((0, 0), ((0, 1), (0, 1), (0, 1)), ()))
    out.append(_result("theta graph automorphisms", aut_order(theta) == 12, f"got {aut_order(theta)}"))
    return out


def check_hae(ctx: VerifyContext) -> list:
    s = ctx.spec
    rep = hae_check(2, s, Gauge(), ctx.genus2.table)
    out = list(rep.checks)
    nl = ctx.genus2.solutions[2].non_leading
    t = ctx.genus2.table
    p11, p12 = t.get(1, 1), t.get(1, 2)
    ok = nl.partial("A") == (p12 + p11 * p11) / 2
    out.append(_result(f"dA(non-leading genus 2) {s.name}", ok, "identity fails"))
    m = modified(s)
    for name in ("E1", "E2", "E3"):
        r = hae2_operator(getattr(m, name), s)
        out.append(_result(f"hae2 operator kills {name} {s.name}", r.is_zero(), f"residual {r}"))
    return out


def check_reduction(ctx: VerifyContext) -> list:
    s = ctx.spec
    t = ctx.genus2.table
    graphs = non_leading_graphs(2)
    parts = pmap_contributions(graphs, (), t, Gauge(), s, ctx.jobs)
    bad = [G.to_text() for G, c in zip(graphs, parts) if not to_modified_basis(c, s).member]
    out = [_result(f"reduction of genus-2 graph terms {s.name}", not bad, "B survives in " + "; ".join(bad))]
    P2 = ctx.genus2.P(2)
    out.append(_result(f"reduction of P_2 {s.name}", to_modified_basis(P2, s).member, "B survives in P_2"))
    return out


def check_quantization(ctx: VerifyContext) -> list:
    s = ctx.spec
    G, M = ctx.thm45_orders
    out = [thm45_check(ctx.genus2.table, Gauge(), s, G, M), verify_conjugation(Gauge(), s)]
    for i, gauge in enumerate(ctx.gauges):
        r = verify_conjugation(gauge, s)
        out.append(CheckResult(f"{r.name} random gauge {i}", r.passed, r.detail))
    out.append(loop_sum_check(Gauge(), s, 6))
    return out


def check_constants(ctx: VerifyContext) -> list:
    s = ctx.spec
    n20 = degree0_constant(2, s)
    out = [_result(f"N_(2,0) {s.name} = chi/5760", n20 == Q(s.chi, 5760), f"got {n20}")]
    f = ctx.genus2.solutions[2].f
    c = f.lam_free().constant_term()
    out.append(_result(f"f_2 constant term {s.name}", c == s.p_k * n20, f"got {c}"))
    return out


def check_invariants(ctx: VerifyContext) -> list:
    s = ctx.spec
    r0 = extract_invariants(0, s, None, ctx.dmax, ctx.T)
    bad = [d for d, n in enumerate(r0.bps, start=1) if n.denominator != 1]
    out = [_result(f"genus-0 BPS integrality {s.name} d<={ctx.dmax}", not bad, f"non-integral at d={bad}")]
    r1 = extract_invariants(1, s, ctx.genus2.table, ctx.dmax, ctx.T)
    out.append(_result(f"genus-1 log term {s.name}", r1.N[0] == s.a1, f"got {r1.N[0]}"))
    return out


@dataclass(frozen=True)
class Check:
    key: str
    run: Callable[[VerifyContext], list]


REGISTRY = (
    Check("relations", check_relations),
    Check("periods", check_period_identity),
    Check("yukawa", check_yukawa),
    Check("closure", check_closure),
    Check("genus1", check_genus1_feynman),
    Check("graphs", check_graphs),
    Check("hae", check_hae),
    Check("reduction", check_reduction),
    Check("quantization", check_quantization),
    Check("constants", check_constants),
    Check("invariants", check_invariants),
)


@dataclass
class VerifyReport:
    results: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def first_failure(self):
        return next((r for r in self.results if not r.passed), None)

    def text(self) -> str:
        return "".join(r.line() + "\n" for r in self.results)


def run_checks(ctx: VerifyContext, keys=None, stop_on_failure: bool = False) -> VerifyReport:
    """Run the registered checks in order.

    With ``stop_on_failure`` the run ends at the first failing group, which
    keeps a corrupted configuration from driving the costly later checks.
    """
    report = VerifyReport()
    for check in REGISTRY:
        if keys is not None and check.key not in keys:
            continue
        res = check.run(ctx)
        report.results.extend(res)
        if stop_on_failure and not all(r.passed for r in res):
            break
    return report


def mutate_r0(spec: TargetSpec, delta) -> TargetSpec:
    """Copy of ``spec`` with ``r0`` shifted, used by the mutation harness."""
    return dataclasses.replace(spec, r0=spec.r0 + Q(delta))
