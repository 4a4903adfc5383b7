"""Command-line front end.

Exit codes: 0 solved, 1 usage or parse error, 2 no solution (for example not
temporal), 3 timeout.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path
from typing import Sequence

from .bench import run_bench, write_corpus, write_csv, write_svg, fit_exponential_base, fit_points
from .cps import format_cps, format_generalized, nontemporal_count, tcs_weight
from .network import (
    NetworkError,
    check_semi_temporal,
    displays,
    distance_of_labeling,
    is_temporal,
    is_tree_child,
    network_from_cps,
    network_from_tcs,
    reticulation_number,
)
from .newick import NewickError, parse_forest, parse_network, write_forest, write_network
from .nonbinary import cherry_picking_nb, min_temporal_nb
from .search import BudgetExhausted, SolveConfig
from .semitemporal import min_semitemporal, pareto_sweep, semi_temporal_cherry_picking
from .temporal import cherry_picking, min_temporal
from .tree import LabelTable, TreeSet

EXIT_OK, EXIT_USAGE, EXIT_NO_SOLUTION, EXIT_TIMEOUT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def k_range(text: str) -> tuple[int, int]:
    """``"7"`` or ``"2:12"`` (inclusive)."""
    try:
        if ":" in text:
            lo, hi = (int(p) for p in text.split(":", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or LO:HI, got {text!r}")
    if lo < 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    return lo, hi


def _verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def _read_forest(path: str, seed: int | None) -> TreeSet:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    ts = parse_forest(text)
    if seed is None:
        return ts
    # a shuffled label table changes leaf ids and hence every tie-break
    names = list(ts.labels)
    random.Random(seed).shuffle(names)
    return parse_forest(write_forest(ts), LabelTable(names))


def _cfg(args, enumerate_all: bool = False) -> SolveConfig:
    return SolveConfig(enumerate_all=enumerate_all, time_budget=args.timeout)


def _solve_temporal(ts: TreeSet, args) -> int:
    sol = min_temporal(ts, _cfg(args), k_max=args.k_max)
    if sol.k is None:
        bound = "" if args.k_max is None else f" with k <= {args.k_max}"
        print(f"NOT-TEMPORAL: no cherry-picking sequence{bound}")
        print(f"nodes={sol.stats.nodes}")
        return EXIT_NO_SOLUTION
    print(f"k={sol.k}")
    print(f"sequence: {format_cps(ts, sol.sequence)}")
    if args.enumerate:
        every = cherry_picking(ts, sol.k, cfg=_cfg(args, True))
        print(f"sequences of weight <= {sol.k}: {len(every)}")
        for s in every:
            print(f"  {format_cps(ts, s)}")
    net, times = network_from_cps(ts, sol.sequence)
    print(f"network: {write_network(net, args.format, times)}".rstrip())
    print(f"tree-child: {_verdict(is_tree_child(net))}")
    print(f"temporal: {_verdict(is_temporal(net) is not None)}")
    print(f"displays all trees: {_verdict(all(displays(net, t, ts.labels) for t in ts.trees))}")
    print(f"r(N)={reticulation_number(net)}: {_verdict(reticulation_number(net) == sol.k)}")
    print(f"nodes={sol.stats.nodes}")
    return EXIT_OK


def _solve_semitemporal(ts: TreeSet, args) -> int:
    if args.p is None:
        front = pareto_sweep(ts, _cfg(args))
        print("pareto front (p: k): " + ", ".join(
            f"{p}: {'-' if k is None else k}" for p, k in front))
        p = next((p for p, k in front if k == front[-1][1]), front[-1][0])
        if front[-1][1] is None:
            print("no tree-child sequence found")
            return EXIT_NO_SOLUTION
    else:
        p = args.p
    sol = min_semitemporal(ts, p, _cfg(args), k_max=args.k_max)
    if sol.k is None:
        print(f"no tree-child sequence with at most {p} non-temporal elements")
        return EXIT_NO_SOLUTION
    s = sol.sequence
    print(f"k={sol.k} p={p}")
    print(f"sequence: {format_generalized(ts, s)}")
    print(f"weight={tcs_weight(ts, s)} non-temporal elements={nontemporal_count(s)}")
    if args.enumerate:
        every = semi_temporal_cherry_picking(ts, sol.k, sol.k, p, cfg=_cfg(args, True))
        print(f"sequences: {len(every)}")
        for e in every:
            print(f"  {format_generalized(ts, e)}")
    net, times = network_from_tcs(s, ts.labels)
    d = distance_of_labeling(net, times)
    print(f"network: {write_network(net, args.format, times)}".rstrip())
    print(f"tree-child: {_verdict(is_tree_child(net))}")
    print(f"semi-temporal labeling: {_verdict(check_semi_temporal(net, times))}")
    print(f"d(N,t)={d} <= p: {_verdict(d <= p)}")
    print(f"displays all trees: {_verdict(all(displays(net, t, ts.labels) for t in ts.trees))}")
    print(f"r(N)={reticulation_number(net)} <= k: {_verdict(reticulation_number(net) <= sol.k)}")
    return EXIT_OK


def _solve_nonbinary(ts: TreeSet, args) -> int:
    sol = min_temporal_nb(ts, _cfg(args), k_max=args.k_max)
    if sol.k is None:
        print("no non-binary cherry-picking sequence found")
        return EXIT_NO_SOLUTION
    print(f"k={sol.k}")
    print(f"sequence: {format_cps(ts, sol.sequence)}")
    if args.enumerate:
        every = cherry_picking_nb(ts, sol.k, _cfg(args, True))
        print(f"sequences of weight <= {sol.k}: {len(every)}")
        for s in every:
            print(f"  {format_cps(ts, s)}")
    net, times = network_from_cps(ts, sol.sequence, nonbinary=True)
    print(f"network: {write_network(net, args.format, times)}".rstrip())
    print(f"tree-child: {_verdict(is_tree_child(net))}")
    print(f"temporal: {_verdict(is_temporal(net) is not None)}")
    print(f"displays all trees: {_verdict(all(displays(net, t, ts.labels) for t in ts.trees))}")
    print(f"r(N)={reticulation_number(net)}: {_verdict(reticulation_number(net) == sol.k)}")
    return EXIT_OK


def cmd_solve(args) -> int:
    ts = _read_forest(args.forest, args.seed)
    if args.mode == "nonbinary":
        return _solve_nonbinary(ts, args)
    if not ts.is_binary():
        raise UsageError(f"mode {args.mode} needs binary trees; try --mode nonbinary")
    if args.mode == "semitemporal":
        return _solve_semitemporal(ts, args)
    return _solve_temporal(ts, args)


def cmd_check(args) -> int:
    net = parse_network(Path(args.network).read_text())
    net.validate()
    ts = _read_forest(args.forest, None)
    print(f"reticulations: {reticulation_number(net)}")
    print(f"tree-child: {'YES' if is_tree_child(net) else 'NO'}")
    print(f"temporal: {'YES' if is_temporal(net) is not None else 'NO'}")
    for i, t in enumerate(ts.trees, 1):
        print(f"displays tree {i}: {'YES' if displays(net, t, ts.labels) else 'NO'}")
    return EXIT_OK


def cmd_generate(args) -> int:
    lo, hi = args.k
    entries = write_corpus(args.out, args.n, args.m, range(lo, hi + 1), args.count,
                           args.seed, args.contract)
    print(f"wrote {len(entries)} instances to {args.out}")
    return EXIT_OK


def cmd_bench(args) -> int:
    records = run_bench(args.corpus, args.timeout, args.mode, args.workers)
    if args.csv:
        write_csv(records, args.csv)
    base = write_svg(records, args.svg) if args.svg else None
    if base is None:
        ks, secs = fit_points(records)
        if len(set(ks)) >= 2:
            base = fit_exponential_base(ks, secs)
    solved = sum(not r.timeout for r in records)
    print(f"instances={len(records)} solved={solved} timeouts={len(records) - solved}")
    if base is not None:
        print(f"fitted base: {base:.3f}")
    return EXIT_OK if solved == len(records) else EXIT_TIMEOUT


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tempnet", description="Temporal hybridization networks from trees.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="minimum-weight sequence and network for a forest")
    s.add_argument("forest", help="Newick forest file ('-' for stdin)")
    s.add_argument("--mode", choices=("temporal", "semitemporal", "nonbinary"), default="temporal")
    s.add_argument("--k-max", type=int, default=None, help="stop deepening at this weight")
    s.add_argument("--p", type=int, default=None, help="non-temporal element budget (semitemporal)")
    s.add_argument("--enumerate", action="store_true", help="list every sequence at the optimum")
    s.add_argument("--timeout", type=float, default=None, help="seconds")
    s.add_argument("--seed", type=int, default=None, help="shuffle leaf ids for tie-breaking")
    s.add_argument("--format", choices=("extended-newick", "dot"), default="extended-newick")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("check", help="verify a network against a forest")
    c.add_argument("network", help="extended Newick network file")
    c.add_argument("forest", help="Newick forest file")
    c.set_defaults(func=cmd_check)

    g = sub.add_parser("generate", help="write a random instance corpus")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, default=2)
    g.add_argument("--k", type=k_range, required=True, help="target weight or LO:HI")
    g.add_argument("--count", type=int, default=1, help="instances per target weight")
    g.add_argument("--contract", type=float, default=0.0, help="edge contraction rate")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    b = sub.add_parser("bench", help="solve a corpus and record timings")
    b.add_argument("corpus")
    b.add_argument("--timeout", type=float, default=600.0)
    b.add_argument("--mode", choices=("auto", "temporal", "semitemporal", "nonbinary"), default="auto")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--csv", default=None)
    b.add_argument("--svg", default=None)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExhausted as exc:
        st = exc.stats
        print(f"TIMEOUT: {exc} (nodes={st.nodes}, deepest k tried={max(st.per_k, default=-1) + 1})")
        return EXIT_TIMEOUT
    except NewickError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, NetworkError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
