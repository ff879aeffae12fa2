"""Feynman rule: recursion, vertex data, genus-one sums and R-matrix structure."""
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gwfeynman.errors import MissingCorrelator, UnstablePair
from gwfeynman.feynman import (
    CorrelatorTable,
    bivector_from_r_matrix,
    contribution_table,
    edge_bivector_A,
    falling,
    feynman_sum_B,
    gauge_matrix_inv,
    leading_decomposition,
    r_matrix_A_inv,
    recursion_step,
    vertex_correlator,
    zmat_mul,
)
from gwfeynman.genring import A, B, X, Gauge, GenPoly, derive, eval_hom, propagators
from gwfeynman.ifunction import a_series, b_series, make_target, x_series
from gwfeynman.pipeline import genus1_seed
from gwfeynman.rational import Q
from gwfeynman.series import derive_D
from gwfeynman.verify import random_gauges

GAUGES = random_gauges(5, seed=0)


def seeded_table(spec):
    t = CorrelatorTable(spec)
    t.set_genus(1, 1, genus1_seed(spec))
    return t


def test_recursion_from_p03(spec):
    assert recursion_step(GenPoly.one(), 0, 3, spec) == -3 * A - 2 * B - X


def test_recursion_genus1_has_no_shift(spec):
    p = genus1_seed(spec)
    assert recursion_step(p, 1, 1, spec) == derive(p, spec) - A * p


@pytest.mark.parametrize("g,m", [(0, 3), (1, 1), (1, 2), (2, 0)])
def test_recursion_commutes_with_eval(spec, g, m):
    T = 30
    p = genus1_seed(spec) if g == 1 else GenPoly.one() + B * X
    lhs = eval_hom(recursion_step(p, g, m, spec), spec, T)
    s = eval_hom(p, spec, T)
    shift = (g - 1) * (2 * b_series(spec, T, 1) + x_series(spec, T)) - m * a_series(spec, T, 1)
    assert lhs == derive_D(s) + shift * s


def test_table_lazy_recursion(z6):
    t = seeded_table(z6)
    assert t.get(0, 3) == 1
    assert t.get(0, 4) == -3 * A - 2 * B - X
    assert t.get(1, 2) == recursion_step(genus1_seed(z6), 1, 1, z6)
    with pytest.raises(MissingCorrelator):
        t.get(2, 0)
    with pytest.raises(ValueError):
        t.set_genus(0, 3, GenPoly.one())


def test_vertex_correlator_rules(z6):
    t = seeded_table(z6)
    assert vertex_correlator(0, 2, 1, t, z6) == 0
    assert vertex_correlator(0, 3, 0, t, z6) == 1
    assert vertex_correlator(0, 3, 2, t, z6) == falling(2, 2) == 2
    assert vertex_correlator(1, 0, 1, t, z6) == Q(z6.chi, 24) - 1
    assert vertex_correlator(1, 0, 3, t, z6) == 2 * (Q(z6.chi, 24) - 1)
    assert vertex_correlator(1, 1, 2, t, z6) == falling(2, 2) * genus1_seed(z6)
    with pytest.raises(UnstablePair):
        vertex_correlator(0, 1, 1, t, z6)


@given(st.integers(-5, 10), st.integers(0, 6))
def test_falling(x, n):
    want = 1
    for i in range(n):
        want *= x - i
    assert falling(x, n) == want


def test_genus1_feynman_value(spec):
    t = seeded_table(spec)
    assert feynman_sum_B(1, 1, 0, t, Gauge(), spec) == spec.a1 - X / 12
    assert spec.a1 == {6: Q(-7, 4), 8: Q(-11, 6), 10: Q(-17, 12)}[spec.k]


def test_genus1_cancellation_by_hand(spec):
    # one-vertex term P_{1,1} plus the loop term with E_psi on the leg
    p = propagators(spec)
    t = seeded_table(spec)
    loop = (vertex_correlator(0, 3, 0, t, spec) * p.E_phiphi) / 2
    leg = -p.E_psi * (Q(spec.chi, 24) - 1)
    total = t.get(1, 1) + leg + loop
    assert total == spec.a1 - X / 12


@pytest.mark.parametrize("i", range(5))
def test_genus1_feynman_random_gauge(spec, i):
    t = seeded_table(spec)
    v = feynman_sum_B(1, 1, 0, t, GAUGES[i], spec)
    assert not any(v.involves(n) for n in ("A", "B", "B2", "B3"))
    assert v.degree_in("X") <= 1


def test_dilaton_leg(spec):
    t = seeded_table(spec)
    assert feynman_sum_B(1, 1, 1, t, Gauge(), spec) == feynman_sum_B(1, 1, 0, t, Gauge(), spec)


@pytest.mark.parametrize("gauge", [Gauge()] + GAUGES[:3], ids=["zero", "g0", "g1", "g2"])
def test_bivector_from_r_matrix(spec, gauge):
    got = bivector_from_r_matrix(r_matrix_A_inv(spec, gauge))
    want = {k: v for k, v in edge_bivector_A(spec, gauge).items() if v}
    assert got == want


@pytest.mark.parametrize("gauge", GAUGES[:3], ids=["g0", "g1", "g2"])
def test_gauge_factorization(spec, gauge):
    assert r_matrix_A_inv(spec, gauge) == zmat_mul(r_matrix_A_inv(spec), gauge_matrix_inv(gauge))


def _transpose_neg_z(M):
    return [[{e: (c if e % 2 == 0 else -c) for e, c in M[j][i].items()} for j in range(4)] for i in range(4)]


@pytest.mark.parametrize("which", ["R", "G"])
def test_symplectic(spec, which):
    eta = [[({0: GenPoly.one()} if i + j == 3 else {}) for j in range(4)] for i in range(4)]
    for gauge in [Gauge()] + GAUGES[:2]:
        M = r_matrix_A_inv(spec, gauge) if which == "R" else gauge_matrix_inv(gauge)
        assert zmat_mul(zmat_mul(_transpose_neg_z(M), eta), M) == eta


def test_gauge_matrix_needs_z_in_corner():
    g = GAUGES[0]
    M = gauge_matrix_inv(g)
    assert 1 in M[2][3] and 0 not in M[2][3]
    broken = [row[:] for row in M]
    broken[2] = list(M[2])
    broken[2][3] = {0: -g.poly("c11")}
    spec = make_target(6)
    assert r_matrix_A_inv(spec, g) != zmat_mul(r_matrix_A_inv(spec), broken)


def test_parallel_matches_serial(z6):
    t = seeded_table(z6)
    serial = leading_decomposition(2, Gauge(), z6, t, jobs=1)
    assert leading_decomposition(2, Gauge(), z6, t, jobs=3) == serial


def test_contribution_table_rows(z6):
    t = seeded_table(z6)
    rows = contribution_table(1, 1, 0, t, Gauge(), z6)
    assert [r.aut for r in rows] == [1, 2]
    total = rows[0].value + rows[1].value
    assert total == z6.a1 - X / 12
    assert rows[1].to_json()["graph"] == "V:[0] E:[(0,0)] L:[0]"
