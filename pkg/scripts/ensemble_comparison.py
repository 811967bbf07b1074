"""Mean approximation ratio vs depth for GREEDY, INTERP, TQA (and optionally the multistart baseline).

Defaults match the 19-instance RRG3 n=10 setup. Worker count: GREEDY_QAOA_WORKERS.
"""
import argparse

from greedy_qaoa.experiment import ExperimentConfig, rows_to_csv, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--count", type=int, default=19)
    ap.add_argument("--p-max", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--with-global", action="store_true", help="also run 2^p multistarts (slow)")
    ap.add_argument("--out", default="results/ensemble")
    args = ap.parse_args()
    strategies = ("greedy", "interp", "tqa") + (("global",) if args.with_global else ())
    cfg = ExperimentConfig(n=args.n, count=args.count, p_max=args.p_max, global_seed=args.seed,
                           strategies=strategies, out_dir=args.out)
    bundle = run_experiment(cfg)
    print(rows_to_csv(bundle["summary"]), end="")


if __name__ == "__main__":
    main()
