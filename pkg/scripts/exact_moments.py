#!/usr/bin/env python3
"""Table of exact finite-N moments next to their large-N limits."""

import argparse

from arealaw.graph_model import load_graph
from arealaw.moment_engine import limit_moment
from arealaw.weingarten import WeingartenError, exact_first_moment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--graph", default="chain")
    ap.add_argument("--n-max", type=int, default=3)
    ap.add_argument("--N", default="2,4,8,16")
    args = ap.parse_args()
    g = load_graph(args.graph)
    Ns = [int(x) for x in args.N.split(",")]
    print("n  limit  " + "  ".join(f"N={N}" for N in Ns))
    for n in range(1, args.n_max + 1):
        cells = []
        for N in Ns:
            try:
                v = exact_first_moment(g, n, N)
                cells.append(f"{v} ({float(v):.6f})")
            except WeingartenError:
                cells.append("-")
        print(f"{n}  {limit_moment(g, n).value}  " + "  ".join(cells))


if __name__ == "__main__":
    main()
