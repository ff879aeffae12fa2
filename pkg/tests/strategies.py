"""Shared hypothesis strategies."""
from hypothesis import strategies as st

from gwfeynman.genring import GenPoly
from gwfeynman.rational import Q
from gwfeynman.series import QSeries

small_q = st.builds(lambda p, q: Q(p, q), st.integers(-20, 20), st.integers(1, 12))
fractions = st.fractions(min_value=-50, max_value=50, max_denominator=30)


def series(order=8, const=None):
    def build(cs):
        if const is not None:
            cs = [Q(const)] + cs[1:]
        return QSeries(cs)

    return st.lists(small_q, min_size=order + 1, max_size=order + 1).map(build)


@st.composite
def genpolys(draw, max_terms=5, max_exp=2, lam=False):
    p = GenPoly.zero()
    for _ in range(draw(st.integers(0, max_terms))):
        exps = draw(st.tuples(*[st.integers(0, max_exp)] * 5))
        mono = GenPoly.const(draw(small_q))
        for name, e in zip(GenPoly.VARS, exps):
            mono = mono * GenPoly.var(name) ** e
        if lam and draw(st.booleans()):
            mono = mono * GenPoly.lam(draw(st.integers(1, 3)))
        p = p + mono
    return p
