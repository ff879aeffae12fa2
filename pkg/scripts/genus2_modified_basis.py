"""Solve genus 2 with symbolic ambiguity and print P_2 in the modified generators."""
import argparse
from dataclasses import dataclass

from gwfeynman.genring import Gauge, to_modified_basis
from gwfeynman.ifunction import SUPPORTED_TARGETS, make_target
from gwfeynman.pipeline import AmbiguitySpec, hae_check, run_pipeline


@dataclass
class Config:
    genus: int = 2


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--genus", type=int, default=Config.genus, choices=(2, 3))
    cfg = Config(**vars(p.parse_args()))
    for k in SUPPORTED_TARGETS:
        spec = make_target(k)
        amb = {g: AmbiguitySpec.symbolic(g) for g in range(2, cfg.genus + 1)}
        res = run_pipeline(spec, cfg.genus, Gauge(), amb)
        P = res.P(cfg.genus)
        red = to_modified_basis(P, spec)
        print(f"{spec.name}: P_{cfg.genus} has {len(P.terms)} terms; in modified basis: {red.member}")
        print(f"  {red.poly}")
        for line in hae_check(cfg.genus, spec, Gauge(), res.table).lines():
            print(f"  {line}")


if __name__ == "__main__":
    main()
