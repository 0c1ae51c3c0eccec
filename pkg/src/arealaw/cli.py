"""Command line entry point: ``arealaw area|moments|mc|verify <spec>``.

Exit codes: 0 success, 1 verification failure, 2 oracle disagreement,
3 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import moment_engine as me
from . import perm_core as pc
from .flow_network import FlowNetworkError, build_network, max_flow, min_cut_value, path_labels
from .graph_model import BRUTE_FORCE_CAP, GraphSpecError, assignment_count, brute_force_area, load_graph
from .mc_simulator import AMPLITUDE_CAP, ExperimentConfig, run_experiment, to_csv
from .weingarten import WeingartenError, exact_first_moment, wg_table

log = logging.getLogger("arealaw")

EXIT_OK, EXIT_FAIL, EXIT_DISAGREE, EXIT_INPUT = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    spec: str
    n_max: int = 3
    Ns: tuple[int, ...] = (2, 4)
    trials: int = 100
    seed: int = 0
    out: str | None = None
    threads: int = 1
    max_tuples: int = me.TUPLE_CAP
    max_amplitudes: int = AMPLITUDE_CAP
    extra: dict = field(default_factory=dict)

    def validate(self):
        for name in ("n_max", "trials", "threads", "max_tuples", "max_amplitudes"):
            if getattr(self, name) <= 0:
                raise ValueError(f"--{name.replace('_', '-')} must be positive")
        if not self.Ns or any(N <= 0 for N in self.Ns):
            raise ValueError("--N values must be positive")
        if self.seed < 0:
            raise ValueError("--seed must be non-negative")


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=False))


def cmd_area(cfg: RunConfig) -> int:
    g = load_graph(cfg.spec)
    net = build_network(g)
    res = max_flow(net)
    report = {"graph": g.name, "area": res.value, "max_flow": res.value,
              "paths": [{"nodes": path_labels(net, p), "units": u} for p, u in res.paths]}
    code = EXIT_OK
    if assignment_count(g) <= BRUTE_FORCE_CAP:
        bf = brute_force_area(g)
        report["brute_force_area"] = bf
        if bf != res.value:
            code = EXIT_DISAGREE
    report["min_cut"] = min_cut_value(net) if g.k <= 20 else None
    if report["min_cut"] is not None and report["min_cut"] != res.value:
        code = EXIT_DISAGREE
    _emit(report)
    return code


def cmd_moments(cfg: RunConfig) -> int:
    g = load_graph(cfg.spec)
    exact_N = cfg.extra.get("exact_N", ())
    rep = me.moment_report(g, cfg.n_max, exact_N=exact_N, gap=cfg.extra.get("gap", True), cap=cfg.max_tuples)
    _emit(rep.to_dict())
    return EXIT_OK


def cmd_mc(cfg: RunConfig) -> int:
    g = load_graph(cfg.spec)
    ecfg = ExperimentConfig(Ns=tuple(cfg.Ns), trials=cfg.trials, n_max=cfg.n_max, seed=cfg.seed,
                            threads=cfg.threads, max_amplitudes=cfg.max_amplitudes)
    samples, summary = run_experiment(g, ecfg)
    text = to_csv(samples, cfg.n_max)
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{g.name}_samples.csv").write_text(text, encoding="utf-8")
        (out / f"{g.name}_summary.json").write_text(json.dumps(summary.to_dict(), indent=2), encoding="utf-8")
        _emit(summary.to_dict())
    else:
        sys.stdout.write(text)
        print(json.dumps(summary.to_dict()), file=sys.stderr)
    return EXIT_OK


def _check(items, name, fn):
    try:
        ok, detail = fn()
    except (me.ScanCapError, WeingartenError) as exc:
        items.append({"check": name, "ok": None, "detail": f"skipped: {exc}"})
        return
    items.append({"check": name, "ok": bool(ok), "detail": detail})


def cmd_verify(cfg: RunConfig) -> int:
    g = load_graph(cfg.spec)
    net = build_network(g)
    flow = max_flow(net)
    X = flow.value
    items: list[dict] = []
    disagree = False

    def area_check():
        nonlocal disagree
        if assignment_count(g) > BRUTE_FORCE_CAP:
            raise me.ScanCapError("crossing oracle over cap")
        bf = brute_force_area(g)
        disagree |= bf != X
        return bf == X, {"max_flow": X, "brute_force_area": bf}

    _check(items, "flow_equals_crossing_oracle", area_check)
    _check(items, "max_flow_equals_min_cut", lambda: (min_cut_value(net) == X, {"min_cut": min_cut_value(net)}))

    def moments_check():
        vals = [me.limit_moment(g, n, cap=cfg.max_tuples).value for n in range(1, cfg.n_max + 1)]
        return vals[0] == 1 and all(v > 0 for v in vals), {"moments": vals}

    _check(items, "limit_moments_positive_and_normalised", moments_check)

    def geodesic_vs_full():
        out = {}
        for n in range(1, cfg.n_max + 1):
            if math.factorial(n) ** g.k > min(cfg.max_tuples, 10**6):
                break
            out[n] = (me.limit_moment(g, n, "geodesic").value, me.limit_moment(g, n, "full").value)
        return all(a == b for a, b in out.values()), {str(k): v for k, v in out.items()}

    _check(items, "limit_moment_geodesic_matches_full", geodesic_vs_full)

    def char_check(form, n):
        def run():
            tab_size = math.factorial(n if form == "n" else 2 * n)
            if tab_size ** g.k > min(cfg.max_tuples, 10**7):
                raise me.ScanCapError(f"{tab_size}^{g.k} beta tuples over verify budget")
            rep = me.check_characterization(g, n, form, pairs=False, cap=cfg.max_tuples)
            return rep.ok, {k: v for k, v in vars(rep).items()}
        return run

    for n in (2, 3):
        _check(items, f"lower_bound_and_equality_form_n_order_{n}", char_check("n", n))
    _check(items, "lower_bound_and_equality_form_nn_order_2", char_check("nn", 2))

    def gap_check():
        res = me.check_gap(g, 2, cap=cfg.max_tuples)
        return res.ok, vars(res)

    _check(items, "connected_gap_at_most_minus_two", gap_check)
    _check(items, "disconnected_additivity", lambda: me.check_disconnect_additivity(g, 2, samples=300))

    def wg_rows():
        bad = []
        for n in range(1, 4):
            for N in range(n, n + 5):
                tab = wg_table(N, n)
                total = sum(tab(p) * Fraction(N) ** p.cycle_count() for p in pc.all_permutations(n))
                if total != 1:
                    bad.append((n, N))
        return not bad, {"failures": bad}

    _check(items, "weingarten_row_sum_identity", wg_rows)

    def trace_one():
        vals = {N: str(exact_first_moment(g, 1, N)) for N in (2, 3, 4)}
        return all(v == "1" for v in vals.values()), vals

    _check(items, "exact_first_moment_order_one", trace_one)
    failed = [it for it in items if it["ok"] is False]
    _emit({"graph": g.name, "area": X, "passed": not failed, "checks": items})
    if disagree:
        return EXIT_DISAGREE
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {"area": cmd_area, "moments": cmd_moments, "mc": cmd_mc, "verify": cmd_verify}


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arealaw", description="Area-law laboratory for random graph states.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("spec", help="graph spec JSON file or bundled name (chain, lattice, single-edge, double-edge)")
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--N", type=_int_list, default=(2, 4), help="comma-separated N values for mc")
    p.add_argument("--exact-N", type=_int_list, default=(), help="N values for exact moments (moments)")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--max-tuples", type=int, default=me.TUPLE_CAP)
    p.add_argument("--max-amplitudes", type=int, default=AMPLITUDE_CAP)
    p.add_argument("--no-gap", action="store_true", help="skip gap exponents in moments")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = RunConfig(command=args.command, spec=args.spec, n_max=3 if args.n_max is None else args.n_max, Ns=args.N,
                    trials=args.trials, seed=args.seed, out=args.out, threads=args.threads,
                    max_tuples=args.max_tuples, max_amplitudes=args.max_amplitudes,
                    extra={"exact_N": args.exact_N, "gap": not args.no_gap})
    try:
        cfg.validate()
        return COMMANDS[args.command](cfg)
    except (GraphSpecError, FlowNetworkError, FileNotFoundError, ValueError) as exc:
        # ScanCapError, SimulationError and WeingartenError are ValueErrors too
        print(f"arealaw: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"arealaw: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
