"""Command-line entry point: ``cominfo <subcommand> ...`` (or ``python -m cominfo``)."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import covering, fixed_distance as fd, hypercontractivity as hc, random_graphs as rg, rectangles
from .model import Cover, JointDistribution, Rectangle, graph_from_spec, load_cover, load_distribution, save_cover


def _dump(obj, out=None):
    text = json.dumps(obj, indent=2, default=_jsonable)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, np.generic):
        return v.item()
    raise TypeError(type(v))


def _hypercube_bits(graph) -> int | None:
    n = graph.left_size.bit_length() - 1
    if graph.left_size == graph.right_size == 1 << n and n >= 1:
        return n
    return None


def cmd_rectmax(args):
    g = graph_from_spec(args.graph)
    if args.mode == "exact":
        res = rectangles.max_rect_exact(g, args.a_cap, args.b_cap, budget=args.budget, workers=args.workers)
    else:
        res = rectangles.max_rect_greedy(g, args.a_cap, args.b_cap, args.restarts, args.seed, args.workers)
    _dump(res.to_json())


def _resolve_base(text, graph, n_bits):
    kind, _, arg = text.partition(":")
    if kind == "sphere":
        if n_bits is None:
            raise SystemExit("sphere base needs a hypercube graph")
        w = int(arg)
        masks = fd.weight_masks(n_bits, w)
        return Rectangle(tuple(masks), tuple(masks))
    if kind == "rect":
        return Rectangle.from_json(json.loads(Path(arg).read_text()))
    raise SystemExit(f"unknown base {text!r}")


def cmd_cover(args):
    g = graph_from_spec(args.graph)
    n_bits = _hypercube_bits(g)
    base = _resolve_base(args.base, g, n_bits)
    if args.graph.startswith("complete:"):
        sampler = covering.SymmetricSampler(g.left_size, g.right_size)
    elif args.graph.startswith("fixed:") and n_bits is not None:
        sampler = covering.HypercubeSampler(n_bits)
    else:
        raise SystemExit("random covers need a built-in edge-transitive graph (fixed:... or complete:...)")
    k = rectangles.rect_edge_count(g, base)
    gamma = args.gamma if args.gamma is not None else math.ceil(math.log2(g.num_edges / k))
    m = args.m or covering.default_cover_size(g.num_edges, gamma)
    results, first = [], None
    for t in range(args.trials):
        c = covering.random_cover(g, sampler, base, m, args.seed + t, gamma)
        ok = c.is_complete()
        results.append(ok)
        if ok and first is None:
            first = c
    summary = {"edges": g.num_edges, "K": k, "gamma": gamma, "m": m, "trials": args.trials,
               "successes": int(sum(results))}
    if first is not None:
        summary["triple"] = list(covering.verify_witness(g, first))
        if args.out:
            save_cover(first, args.out)
            obj = json.loads(Path(args.out).read_text())
            obj["graph"] = args.graph
            Path(args.out).write_text(json.dumps(obj))
    _dump(summary)


def cmd_codec(args):
    obj = json.loads(Path(args.cover).read_text())
    spec = args.graph or obj.get("graph")
    if spec is None:
        raise SystemExit("cover file does not name its graph; pass --graph")
    g = graph_from_spec(spec)
    codec = covering.codec_from_cover(load_cover(args.cover, g))
    if args.action == "encode":
        a, b, c = codec.encode(args.values[0], args.values[1])
        _dump({"a": a, "b": b, "c": c, "bits": list(codec.encode_bits(*args.values[:2]))})
    else:
        x, y = codec.decode(*args.values[:3])
        _dump({"x": x, "y": y})


def _resolve_dist(text) -> JointDistribution:
    if text.startswith("bsc:"):
        parts = text[4:].split(",")
        eps = float(parts[0])
        n = int(dict(p.split("=") for p in parts[1:]).get("n", 1))
        return fd.bsc_distribution(n, eps)
    return load_distribution(text)


def cmd_delta(args):
    d = _resolve_dist(args.dist)
    est = hc.delta_estimate(d, args.tol, hc.OptimizerConfig(seed=args.seed))
    out = {"lower": est.lower, "upper": est.upper, "tolerance": est.tolerance}
    if est.witness is not None:
        out["witness"] = est.witness
    _dump(out)


def cmd_rect_bound(args):
    f = hc.rect_bound_asymptotic if args.asymptotic else hc.rect_bound
    _dump({"bound": f(args.mu, args.nu, args.delta), "asymptotic": args.asymptotic})


def cmd_gk(args):
    v = hc.gk_deficit(args.logx, args.logy, args.delta, args.n, args.a, args.b, args.c)
    _dump({"deficit": v, "infeasible": v < 0})


def cmd_curves(args):
    curves, table = fd.emit_curves(args.eps, fd.parse_grid(args.grid), args.out)
    _dump({"curves": str(curves), "table": str(table)})


def cmd_sphere(args):
    spec = fd.FixedDistanceSpec(args.n, args.d)
    sr = fd.sphere_rectangle(spec, args.w)
    _dump({"n": args.n, "d": args.d, "w": args.w, "side": len(sr.rectangle.left_set),
           "count": sr.count, "brute_count": sr.brute_count, "total_edges": spec.num_edges})


def cmd_bsc_sample(args):
    x, y = fd.sample_bsc_pair(args.n, args.eps, args.seed, args.count)
    for xi, yi in zip(np.atleast_2d(x), np.atleast_2d(y)):
        print("".join(map(str, xi)), "".join(map(str, yi)))


def cmd_randgraph(args):
    spec = rg.RandomMatrixSpec.from_bits(args.n_bits, args.ones_exp)
    target = rg.DensityTarget(args.tau, args.kappa, args.eps)
    rho = args.ones_exp
    rows = []
    for s in range(args.seed, args.seed + args.seeds):
        g = rg.sample_matrix(rg.RandomMatrixSpec(spec.side, spec.ones, s))
        rows.append({"seed": s, **rg.check_sample(g, [target], args.n_bits, rho, args.trials, s)})
    report = {
        "side": spec.side,
        "ones": spec.ones,
        "tau": args.tau,
        "kappa": args.kappa,
        "eps": target.resolved_eps(rho),
        "admissible": target.admissible(rho),
        "threshold": target.threshold(args.n_bits, rho),
        "density_pass": sum(r["density"][0]["ok"] for r in rows),
        "degree_pass": sum(r["degree_ok"] for r in rows),
        "seeds": args.seeds,
        "samples": rows,
    }
    _dump(report, args.out)
    if args.out:
        print(json.dumps({k: report[k] for k in report if k != "samples"}, indent=2))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cominfo", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("rectmax", help="max edges in a capped rectangle")
    s.add_argument("--graph", required=True, help="fixed:n=N,d=D | complete:AxB | graph file")
    s.add_argument("--a-cap", type=int, required=True)
    s.add_argument("--b-cap", type=int, required=True)
    s.add_argument("--mode", choices=("exact", "greedy"), default="exact")
    s.add_argument("--restarts", type=int, default=8)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--budget", type=int, default=rectangles.DEFAULT_BUDGET)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_rectmax)

    s = sub.add_parser("cover", help="randomized cover by automorphic images of a base rectangle")
    s.add_argument("--graph", required=True)
    s.add_argument("--base", required=True, help="sphere:<w> | rect:<json file>")
    s.add_argument("--gamma", type=float, default=None)
    s.add_argument("--m", type=int, default=None, help="number of images (default ceil(2^gamma ln|E|))")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trials", type=int, default=1)
    s.add_argument("--out", help="write the first complete cover here")
    s.set_defaults(func=cmd_cover)

    s = sub.add_parser("codec", help="encode an edge / decode a message triple using a saved cover")
    s.add_argument("--cover", required=True)
    s.add_argument("--graph", default=None)
    s.add_argument("action", choices=("encode", "decode"))
    s.add_argument("values", type=int, nargs="+")
    s.set_defaults(func=cmd_codec)

    s = sub.add_parser("delta", help="bracket the hypercontractivity parameter of a distribution")
    s.add_argument("--dist", required=True, help="JSON file with 'probs', or bsc:EPS[,n=N]")
    s.add_argument("--tol", type=float, default=1e-3)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_delta)

    s = sub.add_parser("rect-bound", help="rectangle probability bound")
    s.add_argument("--mu", type=float, required=True)
    s.add_argument("--nu", type=float, required=True)
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("--asymptotic", action="store_true")
    s.set_defaults(func=cmd_rect_bound)

    s = sub.add_parser("gk", help="common-information deficit of message lengths")
    for name in ("logx", "logy", "delta", "a", "b", "c"):
        s.add_argument(f"--{name}", type=float, required=True)
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_gk)

    s = sub.add_parser("curves", help="write profile bound curves for the fixed-distance graph")
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--grid", default="0.01:0.99:0.01", help="A:B:STEP")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_curves)

    s = sub.add_parser("sphere", help="edge count of the weight-w sphere rectangle")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--w", type=int, required=True)
    s.set_defaults(func=cmd_sphere)

    s = sub.add_parser("bsc-sample", help="sample pairs from the binary symmetric coupling")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--seed", type=int, default=None)
    s.set_defaults(func=cmd_bsc_sample)

    s = sub.add_parser("randgraph", help="desk-scale rectangle density and degree statistics")
    s.add_argument("--n-bits", type=int, required=True)
    s.add_argument("--ones-exp", type=float, default=1.5)
    s.add_argument("--tau", type=float, required=True)
    s.add_argument("--kappa", type=float, required=True)
    s.add_argument("--eps", type=float, default=None)
    s.add_argument("--seeds", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trials", type=int, default=10_000)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_randgraph)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
