"""Acceptance criteria 1 to 12.

Each criterion prints one ``PASS`` or ``FAIL`` line.  Run with
``pytest tests/test_acceptance.py`` or directly with
``python3 tests/test_acceptance.py``.
"""
import io
import sys
import tempfile
import time
from contextlib import redirect_stdout
from pathlib import Path

import pytest

from gwfeynman.cli import main
from gwfeynman.feynman import CorrelatorTable, feynman_sum_B, non_leading_graphs, pmap_contributions
from gwfeynman.genring import (
    X,
    Gauge,
    a2_relation,
    b4_relation,
    closure_rules,
    derive,
    eval_hom,
    from_modified_basis,
    modified,
    propagators,
    to_modified_basis,
)
from gwfeynman.graphs import StableGraph, aut_order, enumerate_graphs
from gwfeynman.ifunction import SUPPORTED_TARGETS, a_series, b_series, make_target, normalized_periods, y_series, yukawa
from gwfeynman.pipeline import (
    AmbiguitySpec,
    degree0_constant,
    extract_invariants,
    genus1_seed,
    hae_check,
    run_pipeline,
)
from gwfeynman.quantization import loop_sum_check, thm45_check, verify_conjugation
from gwfeynman.rational import Q
from gwfeynman.series import derive_D, invert
from gwfeynman.verify import random_gauges

sys.path.insert(0, str(Path(__file__).parent))
from test_graphs import brute_force, oracle_canon  # noqa: E402

T = 30
SPECS = [make_target(k) for k in SUPPORTED_TARGETS]


def _symbolic2(spec):
    return run_pipeline(spec, 2, Gauge(), {2: AmbiguitySpec.symbolic(2)})


def criterion_1():
    t0 = time.perf_counter()
    ok = all(
        eval_hom(a2_relation(s), s, T) == a_series(s, T, 2) and eval_hom(b4_relation(s), s, T) == b_series(s, T, 4)
        for s in SPECS
    )
    dt = time.perf_counter() - t0
    return ok and dt < 10, f"A2 and B4 relations to q^{T} on Z6, Z8, Z10 in {dt:.1f} s"


def criterion_2():
    good = bad_reading_fails = True
    for s in SPECS:
        b = normalized_periods(s, T)
        good &= b.I0 * b.I0 * b.I11 * b.I11 * b.I22 == y_series(s, T)
        alt = 1 + derive_D((derive_D(b.I2 * invert(b.I0)) + 1) * invert(b.I11))
        bad_reading_fails &= b.I0 * b.I0 * b.I11 * b.I11 * alt != y_series(s, T)
    return good and bad_reading_fails, "I0^2 I11^2 I22 = Y to q^30; the I0/I0 reading violates it"


def criterion_3():
    vals = {s.name: yukawa(s, T)[0] for s in SPECS}
    ok = all(yukawa(s, T)[0] == s.p_k == 6 * s.a0 for s in SPECS)
    return ok, "Yukawa constant terms " + ", ".join(f"{k}={v}" for k, v in vals.items())


def criterion_4():
    ok = True
    for s in SPECS:
        m, rules = modified(s), closure_rules(s)
        for name in ("E1", "E2", "E3"):
            want = from_modified_basis(rules[name], s)
            e = getattr(m, name)
            ok &= derive(e, s) == want
            ok &= derive_D(eval_hom(e, s, T)) == eval_hom(want, s, T)
    return ok, "D E1, D E2, D E3 closure as polynomials and as series to q^30"


def criterion_5():
    ok = True
    gauges = random_gauges(5, seed=0)
    for s in SPECS:
        t = CorrelatorTable(s)
        t.set_genus(1, 1, genus1_seed(s))
        ok &= feynman_sum_B(1, 1, 0, t, Gauge(), s) == s.a1 - X / 12
        p = propagators(s)
        ok &= t.get(1, 1) - p.E_psi * (Q(s.chi, 24) - 1) + p.E_phiphi / 2 == s.a1 - X / 12
        for g in gauges:
            v = feynman_sum_B(1, 1, 0, t, g, s)
            ok &= not any(v.involves(n) for n in ("A", "B", "B2", "B3")) and v.degree_in("X") <= 1
    ok &= [s.a1 for s in SPECS] == [Q(-7, 4), Q(-11, 6), Q(-17, 12)]
    return ok, "f^B_(1,1,0) = a1 - X/12 at zero gauge, in Q[X]_1 for 5 random gauges"


def criterion_6():
    counts = [len(enumerate_graphs(0, 3)), len(enumerate_graphs(1, 1)), len(enumerate_graphs(2, 0))]
    edges = [G.n_edges for G in enumerate_graphs(2, 0)]
    split = [edges.count(e) for e in range(4)]
    theta = aut_order(StableGraph((0, 0), ((0, 1), (0, 1), (0, 1)), ()))
    oracle = all(
        {oracle_canon(G.genera, G.edges, G.legs) for G in enumerate_graphs(g, n)} == brute_force(g, n)
        for g, n in ((1, 1), (2, 0))
    )
    ok = counts == [1, 2, 7] and split == [1, 2, 2, 2] and theta == 12 and oracle
    return ok, f"counts {counts}, genus-2 edge split {split}, theta |Aut| = {theta}, brute force agrees"


def criterion_7_as_printed():
    """The two equations and the 'equivalently' clause exactly as worded."""
    residuals = []
    for s in SPECS:
        res = _symbolic2(s)
        rep = hae_check(2, s, Gauge(), res.table)
        t = res.table
        nl = res.solutions[2].non_leading
        literal_nl = nl.partial("A") == (t.get(1, 2) + t.get(1, 1) * t.get(1, 2)) / 2
        residuals.append((s.name, [c.passed for c in rep.literal], literal_nl))
    ok = all(all(flags) and nl for _, flags, nl in residuals)
    detail = "; ".join(f"{n}: hae1 {'ok' if f[0] else 'fails'}, hae2 {'ok' if f[1] else 'fails'}" for n, f, _ in residuals)
    return ok, "printed forms: " + detail + " (see criterion_7_corrected)"


def criterion_7_corrected():
    """hae1 with P_(g1,1) P_(g2,1) and hae2 with a plus sign in front of the d_B3 coefficient."""
    ok = True
    worst = 0.0
    for s in SPECS:
        t0 = time.perf_counter()
        res = _symbolic2(s)
        rep = hae_check(2, s, Gauge(), res.table)
        t = res.table
        nl = res.solutions[2].non_leading
        ok &= rep.passed and nl.partial("A") == (t.get(1, 2) + t.get(1, 1) ** 2) / 2
        worst = max(worst, time.perf_counter() - t0)
    return ok and worst < 60, f"corrected forms hold identically in the unknowns, slowest target {worst:.2f} s"


def criterion_8():
    ok = True
    for s in SPECS:
        res = _symbolic2(s)
        parts = pmap_contributions(non_leading_graphs(2), (), res.table, Gauge(), s)
        ok &= all(to_modified_basis(c, s).member for c in parts)
        ok &= to_modified_basis(res.P(2), s).member
        num = run_pipeline(s, 2, Gauge(), {2: AmbiguitySpec.zero(2)}).P(2)
        ok &= to_modified_basis(num, s).member
    return ok, "all genus-2 graph terms and P_2 lie in Q[E1,E2,E3,X]"


def criterion_9():
    ok = True
    worst = 0.0
    for s in SPECS:
        t0 = time.perf_counter()
        res = _symbolic2(s)
        ok &= thm45_check(res.table, Gauge(), s, 2, 4).passed
        ok &= verify_conjugation(Gauge(), s).passed
        ok &= loop_sum_check(Gauge(), s, 6).passed
        worst = max(worst, time.perf_counter() - t0)
    return ok, f"A = B at (G,M) = (2,4), conjugation and loop sum to x^6; slowest target {worst:.1f} s"


def criterion_10():
    z6, z8, z10 = SPECS
    ok = degree0_constant(2, z6) == Q(-17, 480) == Q(-204, 5760)
    ok &= degree0_constant(2, z8) == Q(-37, 720) == Q(-296, 5760)
    ok &= degree0_constant(2, z10) == Q(-288, 5760)
    for s in SPECS:
        f = _symbolic2(s).solutions[2].f
        ok &= f.lam_free().constant_term() == s.p_k * degree0_constant(2, s)
    return ok, "N_(2,0) = chi/5760 via Bernoulli numbers; f_2 constant term = p_k N_(2,0)"


def criterion_11():
    ok = True
    firsts = []
    for s in SPECS:
        r0 = extract_invariants(0, s, None, 8, T)
        ok &= all(n.denominator == 1 for n in r0.bps)
        firsts.append(int(r0.bps[0]))
        r1 = extract_invariants(1, s, _symbolic2(s).table, 8, T)
        ok &= r1.N[0] == s.a1
    return ok, f"n_(0,d) integral for d <= 8 (n_(0,1) = {firsts}); (QdQ)F_1 constant term = a1"


def _capture(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


def criterion_12():
    with tempfile.TemporaryDirectory() as tmp:
        amb = Path(tmp) / "amb.cfg"
        amb.write_text("2 = [0, 0, 0]\n")
        verify_out, solve_out = set(), set()
        for jobs in (1, 4, 8):
            code, text = _capture(["verify", "--target", "6", "--jobs", str(jobs)])
            verify_out.add((code, text))
            d = Path(tmp) / f"solve{jobs}"
            code, _ = _capture(["solve", "--target", "6", "--ambiguity", str(amb), "--jobs", str(jobs), "--out", str(d)])
            files = tuple((p.name, p.read_bytes()) for p in sorted(d.iterdir()))
            solve_out.add((code, files))
    ok = len(verify_out) == 1 and len(solve_out) == 1 and next(iter(verify_out))[0] == 0
    return ok, "verify and solve outputs byte-identical for jobs 1, 4, 8"


CRITERIA = [
    (1, criterion_1),
    (2, criterion_2),
    (3, criterion_3),
    (4, criterion_4),
    (5, criterion_5),
    (6, criterion_6),
    (7, criterion_7_as_printed),
    (8, criterion_8),
    (9, criterion_9),
    (10, criterion_10),
    (11, criterion_11),
    (12, criterion_12),
]


def _line(n, ok, detail):
    return f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"


def _report(capsys, n, fn):
    ok, detail = fn()
    with capsys.disabled():
        print("\n" + _line(n, ok, detail))
    return ok


@pytest.mark.parametrize("n,fn", [c for c in CRITERIA if c[0] != 7], ids=[f"criterion_{c[0]}" for c in CRITERIA if c[0] != 7])
def test_criterion(capsys, n, fn):
    assert _report(capsys, n, fn)


@pytest.mark.xfail(
    strict=True,
    reason="the printed hae1 product term and hae2 sign are false for the implemented generators; see the decisions ledger",
)
def test_criterion_7_as_printed(capsys):
    assert _report(capsys, 7, criterion_7_as_printed)


def test_criterion_7_corrected(capsys):
    ok, detail = criterion_7_corrected()
    with capsys.disabled():
        print("\n" + _line("7 (proof-consistent forms)", ok, detail))
    assert ok


if __name__ == "__main__":
    failed = 0
    for n, fn in CRITERIA:
        ok, detail = fn()
        failed += not ok
        print(_line(n, ok, detail))
    ok, detail = criterion_7_corrected()
    print(_line("7 (proof-consistent forms)", ok, detail))
    sys.exit(1 if failed else 0)
