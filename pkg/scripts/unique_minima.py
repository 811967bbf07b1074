"""Unique minima per depth under full expansion, averaged over instances, with an exponential fit."""
import argparse

import numpy as np

from greedy_qaoa.initgraph import build_init_graph, fit_exponential, naive_minima_bound
from greedy_qaoa.problem import sample_ensemble


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--count", type=int, default=3)
    ap.add_argument("--p-max", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    table = []
    for g in sample_ensemble("RRG3", args.n, args.count, args.seed):
        counts = build_init_graph(g, args.p_max, expand_cap=None).unique_counts()
        a, k = fit_exponential(counts)
        print(f"seed={g.seed} counts={counts} fit={a:.3f}*exp({k:.3f} p)")
        table.append([counts.get(p, 0) for p in range(1, args.p_max + 1)])
    mean = np.mean(table, axis=0)
    a, k = fit_exponential({p: mean[p - 1] for p in range(1, args.p_max + 1)})
    print("p,mean_unique,naive_bound")
    for p in range(1, args.p_max + 1):
        print(f"{p},{mean[p - 1]:.2f},{naive_minima_bound(p)}")
    print(f"mean fit: N(p) = {a:.3f} exp({k:.3f} p)")


if __name__ == "__main__":
    main()
