"""Compare the two readings of each anomaly equation at a chosen genus.

For every target this prints the residual of the first equation with the
product ``P_(g1,1) P_(g2,k)`` for ``k = 1, 2`` and of the second equation with
either sign in front of the ``d_B3`` coefficient.  It also applies the second
operator to the modified generators, which it must annihilate.
"""
import argparse
from dataclasses import dataclass

from gwfeynman.genring import X, Gauge, modified
from gwfeynman.ifunction import SUPPORTED_TARGETS, make_target
from gwfeynman.pipeline import AmbiguitySpec, hae1_rhs, hae2_operator, run_pipeline


@dataclass
class Config:
    genus: int = 2


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--genus", type=int, default=Config.genus, choices=(2, 3))
    cfg = Config(**vars(p.parse_args()))
    g = cfg.genus
    for k in SUPPORTED_TARGETS:
        spec = make_target(k)
        res = run_pipeline(spec, g, Gauge(), {h: AmbiguitySpec.symbolic(h) for h in range(2, g + 1)})
        P = res.P(g)
        print(spec.name)
        for idx in (1, 2):
            r = -P.partial("A") - hae1_rhs(g, res.table, idx)
            print(f"  first equation with P_(g2,{idx}): {'holds' if r.is_zero() else 'residual ' + str(r)[:70]}")
        for sign in (1, -1):
            r = hae2_operator(P, spec, sign)
            print(f"  second equation, sign {sign:+d}: {'holds' if r.is_zero() else 'residual ' + str(r)[:70]}")
        m = modified(spec)
        for sign in (1, -1):
            killed = [n for n, e in (("E1", m.E1), ("E2", m.E2), ("E3", m.E3), ("X", X)) if hae2_operator(e, spec, sign).is_zero()]
            print(f"  operator with sign {sign:+d} annihilates {killed}")


if __name__ == "__main__":
    main()
