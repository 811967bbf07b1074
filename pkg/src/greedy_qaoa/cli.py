"""Command-line entry point: ``greedy-qaoa {gen-graph,run,initgraph,verify,experiment}``.

Exit codes: 0 ok, 1 partial failure, 2 total failure or bad input.
The worker pool size for ``experiment`` is read from ``GREEDY_QAOA_WORKERS``.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .errors import GreedyQAOAError
from .experiment import SCHEMA_VERSION, STRATEGY_NAMES, ExperimentConfig, rows_to_csv, run_experiment, run_strategy
from .initgraph import build_init_graph, export_graph, fit_exponential
from .optimizer import OptimizerOptions
from .problem import ENSEMBLES, generate_graph, load_graph, save_graph
from .verify import VerifyConfig, verify_suite

EXIT_OK, EXIT_PARTIAL, EXIT_FAIL = 0, 1, 2

log = logging.getLogger("greedy_qaoa")


def _add_optimizer_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol-grad", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--grid-resolution", type=int, default=32)
    p.add_argument("--eps", type=float, default=1e-2, help="displacement along the index-1 direction")


def _opts(args) -> OptimizerOptions:
    return OptimizerOptions(tol_grad=args.tol_grad, max_iter=args.max_iter)


def _write(path, text: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text)


def cmd_gen_graph(args) -> int:
    g = generate_graph(args.ensemble, args.n, args.seed, args.p_e)
    save_graph(g, args.out)
    print(f"wrote {args.out}: n={g.n}, |E|={len(g.edges)}")
    return EXIT_OK


def cmd_run(args) -> int:
    g = load_graph(args.graph)
    cfg = ExperimentConfig(ensemble=g.ensemble if g.ensemble in ("RRG3", "WRRG3", "ER") else "RRG3", n=g.n, count=1,
                           global_seed=args.seed, strategies=(args.strategy,), p_max=args.p_max, eps=args.eps,
                           grid_resolution=args.grid_resolution, tqa_swap=args.tqa_swap, optimizer=_opts(args))
    run = run_strategy(g, args.strategy, cfg, seed=args.seed)
    result = {"schema_version": SCHEMA_VERSION, "graph": g.to_dict(), "strategy": STRATEGY_NAMES[args.strategy],
              "config": {**run.config, "seed": args.seed}, "per_depth": [r.to_dict() for r in run.per_depth]}
    _write(args.out, json.dumps(result, indent=1, sort_keys=True))
    for r in run.per_depth:
        print(f"p={r.p} E={r.point.energy:.10f} r={r.ratio:.6f} |g|={r.point.grad_norm:.1e} "
              f"{r.point.classification.value}")
    return EXIT_OK if all(r.point.converged for r in run.per_depth) else EXIT_PARTIAL


def cmd_initgraph(args) -> int:
    g = load_graph(args.graph)
    cap = None if args.expand_cap <= 0 else args.expand_cap
    gr = build_init_graph(g, args.p_max, args.dedup_tol, cap, args.eps, _opts(args), args.grid_resolution)
    _write(args.out, export_graph(gr, "JSON").decode())
    if args.dot:
        _write(args.dot, export_graph(gr, "DOT").decode())
    counts = gr.unique_counts()
    print("unique minima per depth:", counts)
    if len(counts) >= 2:
        a, k = fit_exponential(counts)
        print(f"fit N(p) = {a:.3f} exp({k:.3f} p)")
    return EXIT_OK


def cmd_verify(args) -> int:
    report = verify_suite(VerifyConfig(seed=args.seed), OptimizerOptions())
    print("\n".join(report.lines()))
    if args.json:
        _write(args.json, json.dumps(report.to_dict(), indent=1))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_experiment(args) -> int:
    if args.config:
        cfg = ExperimentConfig.from_json(Path(args.config).read_text())
        if args.out_dir:
            cfg = replace(cfg, out_dir=args.out_dir)
    else:
        cfg = ExperimentConfig(ensemble=args.ensemble, n=args.n, count=args.count, global_seed=args.seed,
                               p_E=args.p_e, strategies=tuple(args.strategies), p_max=args.p_max, eps=args.eps,
                               grid_resolution=args.grid_resolution, tqa_swap=args.tqa_swap,
                               optimizer=_opts(args), out_dir=args.out_dir)
    bundle = run_experiment(cfg)
    sys.stdout.write(rows_to_csv(bundle["summary"]))
    return {"ok": EXIT_OK, "partial": EXIT_PARTIAL}.get(bundle["status"], EXIT_FAIL)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="greedy-qaoa", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graph", help="sample a graph instance")
    p.add_argument("--ensemble", choices=ENSEMBLES, default="RRG3")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p-e", type=float, default=None, help="edge probability (ER only)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_graph)

    p = sub.add_parser("run", help="run one strategy on one graph")
    p.add_argument("--strategy", choices=sorted(STRATEGY_NAMES), required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--p-max", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--tqa-swap", action="store_true", help="exchange the beta and gamma ramps")
    _add_optimizer_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("initgraph", help="build the initialization graph of minima")
    p.add_argument("--graph", required=True)
    p.add_argument("--p-max", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dot", default=None)
    p.add_argument("--expand-cap", type=int, default=50, help="nodes expanded per level; <= 0 expands all")
    p.add_argument("--dedup-tol", type=float, default=1e-5)
    _add_optimizer_flags(p)
    p.set_defaults(func=cmd_initgraph)

    p = sub.add_parser("verify", help="run the numerical self-check suite")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--json", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", help="ensemble sweep over strategies")
    p.add_argument("--config", default=None, help="ExperimentConfig JSON; overrides the flags below")
    p.add_argument("--ensemble", choices=ENSEMBLES, default="RRG3")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--count", type=int, default=19)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p-e", type=float, default=None)
    p.add_argument("--strategies", nargs="+", choices=sorted(STRATEGY_NAMES), default=["greedy", "interp", "tqa"])
    p.add_argument("--p-max", type=int, default=8)
    p.add_argument("--tqa-swap", action="store_true")
    p.add_argument("--out-dir", default=None)
    _add_optimizer_flags(p)
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (GreedyQAOAError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
