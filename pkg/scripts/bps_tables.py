"""Print genus-0 and genus-1 Gopakumar-Vafa tables for the supported targets."""
import argparse
from dataclasses import dataclass

from gwfeynman.genring import Gauge
from gwfeynman.ifunction import SUPPORTED_TARGETS, make_target
from gwfeynman.pipeline import extract_invariants, genus1_bps, run_pipeline


@dataclass
class Config:
    dmax: int = 8
    order: int = 20


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--dmax", type=int, default=Config.dmax)
    p.add_argument("--order", type=int, default=Config.order)
    cfg = Config(**vars(p.parse_args()))
    for k in SUPPORTED_TARGETS:
        spec = make_target(k)
        table = run_pipeline(spec, 1, Gauge()).table
        r0 = extract_invariants(0, spec, None, cfg.dmax, cfg.order)
        r1 = extract_invariants(1, spec, table, cfg.dmax, cfg.order)
        n1 = genus1_bps(r0.N, r1.N)
        print(f"{spec.name}")
        print(f"  {'d':>2}  {'n_(0,d)':>32}  {'n_(1,d)':>32}")
        for d in range(1, cfg.dmax + 1):
            print(f"  {d:>2}  {int(r0.bps[d - 1]):>32}  {str(n1[d - 1]):>32}")


if __name__ == "__main__":
    main()
