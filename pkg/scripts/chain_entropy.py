#!/usr/bin/env python3
"""Sample H(rho_S) - X log N for a graph at several N and print per-N means."""

import argparse
import json

from arealaw.freepoisson import fp_entropy
from arealaw.graph_model import load_graph
from arealaw.mc_simulator import ExperimentConfig, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--graph", default="chain")
    ap.add_argument("--N", default="2,4,8")
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    g = load_graph(args.graph)
    Ns = tuple(int(x) for x in args.N.split(","))
    _, summary = run_experiment(g, ExperimentConfig(Ns=Ns, trials=args.trials, n_max=2, seed=args.seed,
                                                    threads=args.threads))
    rows = [{"N": r["N"], "offset_mean": r["offset_mean"], "offset_stderr": r["offset_stderr"]}
            for r in summary.per_N]
    print(json.dumps({"graph": g.name, "area": summary.area, "free_poisson_c1_entropy": fp_entropy(1.0),
                      "per_N": rows}, indent=2))


if __name__ == "__main__":
    main()
