"""Command-line interface.

Subcommands: construct | metrics | cutpoints | certify | sample | enumerate
| sweep | ldp.  Results go to stdout as JSON unless --out points at a
directory, in which case files are written there together with a manifest
recording the full parameters, seed, and package version.  Exit codes:
0 ok, 1 user error, 2 internal error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .constructions import (
    bottomup_construction,
    critical_construction,
    dyadic_edges,
    topdown_construction,
)
from .cutpoints import cutpoint_sequence, local_cutpoints
from .experiments import (
    SweepConfig,
    build_manifest,
    default_output_dir,
    ldp_check,
    staircase_sweep,
    write_manifest,
    write_sweep_csv,
)
from .gibbs import ModelParams, enumerate_exact, sample_reference
from .graph import (
    apsp,
    avg_path_length,
    cost,
    diameter_exact,
    graph_from_edges,
    graph_from_json,
    graph_to_json,
)
from .layers import CertParams, certify_long_edge_mass, level3_layers


def _parse_p(text: str) -> float:
    if text in ("inf", "Inf", "infinity", "Infinity"):
        return math.inf
    p = float(text)
    if p < 1:
        raise argparse.ArgumentTypeError(f"p must lie in [1, inf], got {text}")
    return p


def _parse_interval(text: str) -> tuple[int, int]:
    try:
        a, b = text.split(":")
        return int(a), int(b)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a:b, got {text!r}") from exc


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gibbsgraph", description=__doc__)
    ap.add_argument("--version", action="version", version=f"gibbsgraph {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="emit a deterministic hierarchical graph")
    c.add_argument("--kind", required=True, choices=["topdown", "bottomup", "critical", "dyadic"])
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--alpha", type=float, help="target exponent for topdown/bottomup")
    c.add_argument("--k", type=int, help="layer count (critical) or scale (dyadic)")
    c.add_argument("--k-high", type=int, help="top scale for dyadic (default: same as --k)")
    c.add_argument("--out", help="output directory")

    m = sub.add_parser("metrics", help="path-length metrics of a graph JSON file")
    m.add_argument("--graph", required=True, help="path to graph JSON")
    m.add_argument("--p", type=_parse_p, default=1.0)
    m.add_argument("--gamma", type=float, default=1.0, help="cost exponent for the cost field")
    m.add_argument("--out", help="output directory")

    cp = sub.add_parser("cutpoints", help="cutpoint sequence / local cutpoints of a graph")
    cp.add_argument("--graph", required=True)
    cp.add_argument("--sigma", type=int, default=1)
    cp.add_argument("--interval", type=_parse_interval, help="a:b for local cutpoints")
    cp.add_argument("--out", help="output directory")

    ce = sub.add_parser("certify", help="layer certificate + long-edge mass report")
    ce.add_argument("--graph", required=True)
    ce.add_argument("--k", type=int, required=True)
    ce.add_argument("--eta", type=float, required=True)
    ce.add_argument("--delta", type=float, required=True)
    ce.add_argument("--p", type=_parse_p, default=1.0)
    ce.add_argument("--out", help="output directory")

    s = sub.add_parser("sample", help="reference-measure graph samples")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--gamma", type=float, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--out", help="output directory")

    e = sub.add_parser("enumerate", help="exact partition value and expectations (small N)")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--gamma", type=float, required=True)
    e.add_argument("--b", type=float, required=True)
    e.add_argument("--p", type=_parse_p, required=True)
    e.add_argument("--out", help="output directory")

    sw = sub.add_parser("sweep", help="exponent-estimate sweep from a JSON config")
    sw.add_argument("--config", required=True, help="path to sweep config JSON")
    sw.add_argument("--out", help="output directory (default: GIBBSGRAPH_OUTDIR or .)")
    sw.add_argument("--workers", type=int, default=1, help="parallel cells (results identical)")

    l = sub.add_parser("ldp", help="stretched-exponential tail deviation check")
    l.add_argument("--gamma", type=float, required=True)
    l.add_argument("--theta", type=float, default=1.0)
    l.add_argument("--m", type=float, required=True)
    l.add_argument("--n-grid", type=int, nargs="+", required=True)
    l.add_argument("--trials", type=int, default=10**5)
    l.add_argument("--seed", type=int, default=0)
    l.add_argument("--out", help="output directory")
    return ap


def _emit(payload: dict, args, name: str) -> None:
    """Print JSON to stdout, or write it (plus a manifest) under --out."""
    if not getattr(args, "out", None):
        json.dump(payload, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
        return
    os.makedirs(args.out, exist_ok=True)
    manifest = {
        "tool": "gibbsgraph",
        "version": __version__,
        "kind": name,
        "params": {k: v for k, v in vars(args).items() if k not in ("command", "out")},
    }
    digest = write_manifest(_jsonable(manifest), os.path.join(args.out, f"{name}_manifest.json"))
    payload = {**payload, "manifest_hash": digest}
    path = os.path.join(args.out, f"{name}.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(path)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def _cmd_construct(args) -> int:
    n = args.n
    if args.kind in ("topdown", "bottomup"):
        if args.alpha is None:
            print("construct: --alpha is required for topdown/bottomup", file=sys.stderr)
            return 1
        g = (topdown_construction if args.kind == "topdown" else bottomup_construction)(n, args.alpha)
    elif args.kind == "critical":
        if args.k is None:
            print("construct: --k is required for critical", file=sys.stderr)
            return 1
        g = critical_construction(n, args.k)
    else:
        if args.k is None:
            print("construct: --k is required for dyadic", file=sys.stderr)
            return 1
        k_high = args.k_high if args.k_high is not None else args.k
        g = graph_from_edges(n, dyadic_edges(n, args.k, k_high))
    payload = graph_to_json(g)
    payload["cost_gamma1"] = cost(g, 1.0)
    payload["diameter"] = diameter_exact(g)
    _emit(payload, args, "construct")
    return 0


def _cmd_metrics(args) -> int:
    with open(args.graph, encoding="utf-8") as fh:
        g = graph_from_json(json.load(fh))
    cache = apsp(g, args.p)
    payload = {
        "n": g.n,
        "p": "inf" if math.isinf(args.p) else args.p,
        "avg_path_length": avg_path_length(cache, args.p),
        "diameter": cache.diameter,
        "long_edges": len(g.long_edges),
        "cost": cost(g, args.gamma),
        "cost_gamma": args.gamma,
    }
    _emit(payload, args, "metrics")
    return 0


def _cmd_cutpoints(args) -> int:
    with open(args.graph, encoding="utf-8") as fh:
        g = graph_from_json(json.load(fh))
    rep = cutpoint_sequence(g, args.sigma)
    payload = {
        "n": g.n,
        "sigma": rep.sigma,
        "points": rep.points,
        "t_count": rep.t_count,
    }
    if args.interval is not None:
        loc = local_cutpoints(g, args.interval)
        payload["interval"] = list(loc.interval)
        payload["local_points"] = loc.points
        payload["local_t_count"] = loc.t_count
    _emit(payload, args, "cutpoints")
    return 0


def _cmd_certify(args) -> int:
    with open(args.graph, encoding="utf-8") as fh:
        g = graph_from_json(json.load(fh))
    cache = apsp(g, args.p)
    params = CertParams(p=args.p, k=args.k, eta=args.eta, delta=args.delta)
    cert = level3_layers(g, cache, params)
    report = certify_long_edge_mass(g, cache, args.p, args.k, args.eta, args.delta)
    payload = {
        "n": g.n,
        "params": {
            "p": "inf" if math.isinf(args.p) else args.p,
            "k": args.k,
            "eta": args.eta,
            "delta": args.delta,
            "sigma": params.sigma,
        },
        "layers": [sorted(list(map(list, lam))) for lam in cert.lambdas],
        "coverage_counts": cert.coverage_counts,
        "long_edge_mass": cert.long_edge_mass,
        "irregular_count": cert.irregular_count,
        "audit": [
            {"name": c.name, "lhs": c.lhs, "rhs": c.rhs, "ok": c.ok} for c in cert.audit
        ],
        "audit_ok": cert.audit_ok,
        "mass_report": {
            "h_measured": report.h_measured,
            "h_threshold": report.h_threshold,
            "hypothesis_holds": report.hypothesis_holds,
            "mass": report.mass,
            "mass_threshold": report.mass_threshold,
            "conclusion_holds": report.conclusion_holds,
            "irregular_count": report.irregular_count,
            "irregular_bound": report.irregular_bound,
            "irregular_bound_holds": report.irregular_bound_holds,
        },
    }
    _emit(_jsonable(payload), args, "certify")
    return 0


def _cmd_sample(args) -> int:
    params = ModelParams(args.n, args.gamma, 0.0, 1.0)
    rng = np.random.default_rng(args.seed)
    graphs = [graph_to_json(sample_reference(params, rng)) for _ in range(args.count)]
    payload = {"n": args.n, "gamma": args.gamma, "seed": args.seed, "graphs": graphs}
    _emit(payload, args, "sample")
    return 0


def _cmd_enumerate(args) -> int:
    params = ModelParams(args.n, args.gamma, args.b, args.p)
    summary = enumerate_exact(params)
    payload = {
        "n": args.n,
        "gamma": args.gamma,
        "b": args.b,
        "p": "inf" if math.isinf(args.p) else args.p,
        "partition_value": summary.partition_value,
        "expectations": summary.expectations,
    }
    _emit(payload, args, "enumerate")
    return 0


def _cmd_sweep(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        config = SweepConfig.from_json(json.load(fh))
    out_dir = args.out or default_output_dir()
    os.makedirs(out_dir, exist_ok=True)
    manifest = build_manifest(config)
    digest = write_manifest(manifest, os.path.join(out_dir, "sweep_manifest.json"))
    rows = staircase_sweep(config, workers=args.workers)
    csv_path = os.path.join(out_dir, "sweep.csv")
    write_sweep_csv(rows, csv_path, digest)
    print(csv_path)
    return 0


def _cmd_ldp(args) -> int:
    cells = ldp_check(args.gamma, args.theta, args.m, args.n_grid, args.trials, seed=args.seed)
    payload = {
        "gamma": args.gamma,
        "theta": args.theta,
        "m": args.m,
        "trials": args.trials,
        "seed": args.seed,
        "cells": [
            {
                "n": c.n,
                "hits": c.hits,
                "p_hat": c.p_hat,
                "rate_statistic": c.rate_statistic,
                "is_lower_bound": c.is_lower_bound,
            }
            for c in cells
        ],
    }
    _emit(payload, args, "ldp")
    return 0


_HANDLERS = {
    "construct": _cmd_construct,
    "metrics": _cmd_metrics,
    "cutpoints": _cmd_cutpoints,
    "certify": _cmd_certify,
    "sample": _cmd_sample,
    "enumerate": _cmd_enumerate,
    "sweep": _cmd_sweep,
    "ldp": _cmd_ldp,
}


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help/--version
        return 0 if exc.code in (0, None) else 1
    try:
        return _HANDLERS[args.command](args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"gibbsgraph {args.command}: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # internal error
        print(f"gibbsgraph {args.command}: internal error: {exc!r}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())
