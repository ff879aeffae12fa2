"""Command line: ``gwfeynman verify | solve | graphs``.

Exit codes are 0 on success, 1 when a verification check fails and 2 for
configuration errors (including unsupported targets, unstable pairs and
missing ambiguity data).
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigError, GWFeynmanError
from .feynman import contribution_table
from .genring import Gauge
from .graphs import aut_order, enumerate_graphs
from .ifunction import make_target
from .manifest import build_manifest, collect_invariants, dumps, write_outputs
from .pipeline import AmbiguitySpec, run_pipeline
from .rational import parse_q
from .verify import VerifyContext, mutate_r0, run_checks

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


@dataclass
class RunConfig:
    target: int = 6
    order: int = 30
    genus: int = 2
    gauge: Gauge = field(default_factory=Gauge)
    ambiguity: dict = field(default_factory=dict)
    out: str | None = None
    format: str = "json"
    jobs: int = 1
    dmax: int = 8
    mutate_r0: object = 0

    def validate(self) -> None:
        make_target(self.target)
        if self.genus < 0:
            raise ConfigError("genus must be non-negative")
        if self.order < 3 * self.genus + 10:
            raise ConfigError(f"order {self.order} is too small for genus {self.genus}; need at least {3 * self.genus + 10}")
        if not 1 <= self.dmax <= self.order:
            raise ConfigError("dmax must lie between 1 and the series order")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        for g, amb in self.ambiguity.items():
            if amb.g != g:
                raise ConfigError("ambiguity genus mismatch")


def read_flat(path: str) -> dict:
    """Parse ``key = <JSON value>`` lines; ``#`` starts a comment line."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        try:
            out[key.strip()] = json.loads(value.strip())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{lineno}: value is not JSON: {exc.msg}") from exc
    return out


def parse_gauge(data: dict) -> Gauge:
    try:
        return Gauge.from_json({k: [str(c) for c in v] for k, v in data.items()})
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad gauge: {exc}") from exc


def parse_ambiguity(data: dict) -> dict:
    out = {}
    for key, value in data.items():
        try:
            g = int(key)
        except ValueError as exc:
            raise ConfigError(f"ambiguity keys must be genera, got {key!r}") from exc
        try:
            if value == "symbolic":
                out[g] = AmbiguitySpec.symbolic(g)
            else:
                out[g] = AmbiguitySpec(g, tuple(parse_q(str(v)) for v in value))
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad ambiguity for genus {key}: {exc}") from exc
    return out


def load_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    names = {f.name for f in fields(RunConfig)}
    if getattr(args, "config", None):
        for key, value in read_flat(args.config).items():
            if key not in names:
                raise ConfigError(f"unknown config key {key!r}")
            if key == "gauge":
                value = parse_gauge(value)
            elif key == "ambiguity":
                value = parse_ambiguity(value)
            setattr(cfg, key, value)
    for key in ("target", "order", "genus", "out", "format", "jobs", "dmax", "mutate_r0"):
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    if getattr(args, "gauge", None):
        cfg.gauge = parse_gauge(read_flat(args.gauge))
    if getattr(args, "ambiguity", None):
        cfg.ambiguity = parse_ambiguity(read_flat(args.ambiguity))
    try:
        cfg.mutate_r0 = parse_q(str(cfg.mutate_r0))
    except ValueError as exc:
        raise ConfigError(f"bad mutate_r0: {exc}") from exc
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# commands


def cmd_verify(cfg: RunConfig, stream=None) -> int:
    stream = stream or sys.stdout
    spec = make_target(cfg.target)
    if cfg.mutate_r0:
        spec = mutate_r0(spec, cfg.mutate_r0)
    ctx = VerifyContext(spec, T=cfg.order, jobs=cfg.jobs, dmax=min(cfg.dmax, cfg.order))
    if not cfg.gauge.is_zero():
        ctx.gauges = [cfg.gauge] + ctx.gauges
    report = run_checks(ctx, stop_on_failure=True)
    text = report.text()
    stream.write(text)
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "verify_report.txt").write_text(text)
    if not report.passed:
        bad = report.first_failure()
        print(f"verification failed: {bad.line()}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_solve(cfg: RunConfig, stream=None) -> int:
    stream = stream or sys.stdout
    spec = make_target(cfg.target)
    result = run_pipeline(spec, cfg.genus, cfg.gauge, cfg.ambiguity, cfg.jobs)
    invariants = collect_invariants(result, cfg.genus, cfg.dmax, cfg.order)
    manifest = build_manifest(result, cfg.genus, cfg.order, cfg.dmax, invariants)
    if cfg.out:
        out = Path(cfg.out)
        write_outputs(out, manifest, invariants, cfg.format)
        for g in range(2, cfg.genus + 1):
            rows = contribution_table(g, 0, 0, result.table, cfg.gauge, spec, cfg.jobs)
            (out / f"contributions_{g}.json").write_text(dumps([r.to_json() for r in rows]))
    else:
        stream.write(dumps(manifest))
    return EXIT_OK


def cmd_graphs(g: int, n: int, stream=None) -> int:
    stream = stream or sys.stdout
    for G in enumerate_graphs(g, n):
        stream.write(f"{G.to_text()} |Aut|={aut_order(G)}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = JSON config file")
    p.add_argument("--target", type=int, help="hypersurface degree: 6, 8 or 10")
    p.add_argument("--order", type=int, help="q-series truncation order T")
    p.add_argument("--genus", type=int, help="maximal genus G")
    p.add_argument("--gauge", help="gauge file with keys c11, c12, c2, c3")
    p.add_argument("--jobs", type=int, help="worker processes for graph sums")
    p.add_argument("--out", help="output directory")
    p.add_argument("--dmax", type=int, help="largest degree in invariant tables")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gwfeynman", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run the identity checks for one target")
    _common(v)
    v.add_argument("--mutate-r0", dest="mutate_r0", help="shift r0 by this rational (mutation test)")
    s = sub.add_parser("solve", help="compute P_g through the requested genus")
    _common(s)
    s.add_argument("--ambiguity", help="ambiguity file: genus = [values] or \"symbolic\"")
    s.add_argument("--format", choices=("json", "csv"), help="invariant table format")
    gr = sub.add_parser("graphs", help="list stable graphs with automorphism orders")
    gr.add_argument("g", type=int)
    gr.add_argument("n", type=int)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "graphs":
            return cmd_graphs(args.g, args.n)
        cfg = load_config(args)
        if args.command == "verify":
            return cmd_verify(cfg)
        return cmd_solve(cfg)
    except GWFeynmanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
