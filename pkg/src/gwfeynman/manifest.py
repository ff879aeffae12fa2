"""Serialization of solver runs: a JSON manifest plus CSV invariant tables.

All numbers are exact ``"p/q"`` strings and keys are sorted, so equal runs
produce identical bytes.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

from .genring import Gauge, GenPoly
from .ifunction import make_target
from .pipeline import AmbiguitySpec, InvariantReport, PipelineResult, extract_invariants
from .rational import fmt_q, parse_q


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def collect_invariants(result: PipelineResult, G: int, dmax: int, T: int) -> dict:
    """Invariant reports for every genus whose potential has no unknowns."""
    out = {0: extract_invariants(0, result.spec, result.table, dmax, T)}
    if G >= 1:
        out[1] = extract_invariants(1, result.spec, result.table, dmax, T)
    for g in range(2, G + 1):
        if not result.P(g).has_ambiguity():
            out[g] = extract_invariants(g, result.spec, result.table, dmax, T)
    return out


def build_manifest(result: PipelineResult, G: int, T: int, dmax: int, invariants: dict) -> dict:
    potentials = {"0": str(result.P(0))}
    if G >= 1:
        potentials["1"] = str(result.P(1))
    for g in range(2, G + 1):
        potentials[str(g)] = str(result.P(g))
    return {
        "target": result.spec.k,
        "order": T,
        "genus": G,
        "dmax": dmax,
        "gauge": result.gauge.to_json(),
        "ambiguity": {str(g): a.to_json() for g, a in sorted(result.ambiguities.items())},
        "potentials": potentials,
        "potential_index": {"0": "P_(0,3)", "1": "P_(1,1)", "g>=2": "P_g = P_(g,0)"},
        "invariants": {str(g): rep.to_json() for g, rep in sorted(invariants.items())},
    }


def invariant_csv(invariants: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["genus", "degree", "N", "n"])
    for g, rep in sorted(invariants.items()):
        for d, val in enumerate(rep.N):
            bps = rep.bps[d - 1] if d >= 1 and rep.bps else None
            w.writerow([g, d, "" if val is None else fmt_q(val), "" if bps is None else fmt_q(bps)])
    return buf.getvalue()


def write_outputs(out_dir: Path, manifest: dict, invariants: dict, fmt: str) -> list:
    """Write the manifest, one text file per potential and the invariant table."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    def put(name, text):
        path = out_dir / name
        path.write_text(text)
        written.append(path)

    put("manifest.json", dumps(manifest))
    for g, text in manifest["potentials"].items():
        put(f"P_{g}.txt", text + "\n")
    if fmt == "csv":
        put("invariants.csv", invariant_csv(invariants))
    else:
        put("invariants.json", dumps(manifest["invariants"]))
    return written


@dataclass(frozen=True)
class LoadedManifest:
    target: int
    order: int
    genus: int
    gauge: Gauge
    ambiguity: dict
    potentials: dict
    invariants: dict


def _parse_report(data: dict) -> InvariantReport:
    N = tuple(None if v is None else parse_q(v) for v in data["N"])
    return InvariantReport(data["genus"], N, tuple(parse_q(v) for v in data["bps"]))


def load_manifest(data: dict) -> LoadedManifest:
    make_target(data["target"])
    amb = {}
    for g, v in data["ambiguity"].items():
        amb[int(g)] = AmbiguitySpec(int(g), None if v == "symbolic" else tuple(parse_q(x) for x in v))
    return LoadedManifest(
        target=data["target"],
        order=data["order"],
        genus=data["genus"],
        gauge=Gauge.from_json(data["gauge"]),
        ambiguity=amb,
        potentials={int(g): GenPoly.parse(t) for g, t in data["potentials"].items()},
        invariants={int(g): _parse_report(r) for g, r in data["invariants"].items()},
    )
