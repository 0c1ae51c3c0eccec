#!/usr/bin/env python3
"""Exact and sampled variance of the rescaled moment against N, with log-log slopes."""

import argparse
import math

import numpy as np

from arealaw.graph_model import load_graph
from arealaw.mc_simulator import ExperimentConfig, loglog_slope, run_experiment
from arealaw.weingarten import WeingartenError, exact_variance


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--graph", default="chain")
    ap.add_argument("--order", type=int, default=2)
    ap.add_argument("--exact-N", default="4,8,16")
    ap.add_argument("--mc-N", default="2,4,8")
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    g = load_graph(args.graph)

    exact_Ns, exact_vals = [], []
    for N in (int(x) for x in args.exact_N.split(",")):
        try:
            v = float(exact_variance(g, args.order, N))
        except WeingartenError as exc:
            print(f"exact N={N}: skipped ({exc})")
            continue
        exact_Ns.append(N)
        exact_vals.append(v)
        print(f"exact N={N}: variance={v:.6e}")
    if len(exact_Ns) > 1:
        print(f"exact log-log slope: {loglog_slope(exact_Ns, exact_vals)}")

    Ns = tuple(int(x) for x in args.mc_N.split(","))
    samples, _ = run_experiment(g, ExperimentConfig(Ns=Ns, trials=args.trials, n_max=args.order, seed=args.seed))
    mc = []
    for N in Ns:
        xs = np.array([s.moments[args.order - 1] for s in samples if s.N == N])
        mc.append(float(np.var(xs, ddof=1)))
        print(f"mc N={N}: variance={mc[-1]:.6e} (trials={len(xs)}, mean={xs.mean():.6f} "
              f"+- {xs.std(ddof=1) / math.sqrt(len(xs)):.6f})")
    print(f"mc log-log slope: {loglog_slope(Ns, mc)}")


if __name__ == "__main__":
    main()
