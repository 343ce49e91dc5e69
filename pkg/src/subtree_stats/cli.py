"""Command-line entry point ``subtree``.

Exit codes: 0 on success, 1 when an assertion experiment records a failure,
2 on usage errors (bad arguments, unreadable input, caps exceeded).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .counting import (
    DEFAULT_MAX_EXACT_N,
    pair_count,
    spanning_probability,
    subtree_census,
)
from .experiments import (
    ASSERTION_EXPERIMENTS,
    EXPERIMENTS,
    failed_assertions,
    format_report,
    load_config_file,
    make_config,
    parse_config_value,
    run_experiment,
)
from .graph import read_edge_list

log = logging.getLogger("subtree")


class UsageError(Exception):
    pass


def _graph_arg(path: str):
    try:
        return read_edge_list(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def cmd_census(args) -> int:
    census = subtree_census(_graph_arg(args.graph), args.max_exact_n)
    if args.format == "json":
        print(census.to_json())
    else:
        print("k,s_k")
        for k, s in enumerate(census.counts, start=1):
            print(f"{k},{s}")
        print(f"total,{census.total}")
    return 0


def cmd_prob(args) -> int:
    prob = spanning_probability(_graph_arg(args.graph), args.max_exact_n)
    if args.format == "json":
        print(json.dumps({"numerator": str(prob.numerator), "denominator": str(prob.denominator),
                          "value": prob.float_value}))
    else:
        print(f"{prob}\t{prob.float_value!r}")
    return 0


def cmd_pairs(args) -> int:
    g = _graph_arg(args.graph)
    if not 0 <= args.k < max(g.n, 1):
        raise UsageError(f"--k must lie in 0..{g.n - 1}")
    pc = pair_count(g, args.k, args.max_exact_n)
    if args.format == "json":
        print(json.dumps({"k": pc.k, "pairs": str(pc.value)}))
    else:
        print(pc.value)
    return 0


_EXPERIMENT_KEYS = ("n", "p", "schedule", "trials", "seed", "k", "depth", "clique", "path_len",
                    "max_exact_n", "budget", "threads", "out", "format")


def cmd_experiment(args) -> int:
    values = {}
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc.strerror}") from None
        values.update(load_config_file(text))
    for key in _EXPERIMENT_KEYS:
        raw = getattr(args, key, None)
        if raw is None:
            continue
        if isinstance(raw, list):
            raw = " ".join(raw)
        try:
            values[key] = parse_config_value(key, raw) if isinstance(raw, str) else raw
        except ValueError as exc:
            raise UsageError(f"--{key.replace('_', '-')}: {exc}") from None
    cfg = make_config(args.name, **values)
    rows = run_experiment(cfg)
    text = format_report(rows, cfg.format)
    if cfg.out:
        Path(cfg.out).write_text(text)
        log.info("wrote %d rows to %s", len(rows), cfg.out)
    else:
        sys.stdout.write(text)
    if cfg.name in ASSERTION_EXPERIMENTS:
        bad = failed_assertions(rows)
        if bad:
            for r in bad[:20]:
                print(f"FAIL {r.label} {r.quantity}: {r.value} ({r.exact})", file=sys.stderr)
            return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="subtree", description="Exact subtree statistics and random-graph experiments.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def graph_cmd(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("graph", help="edge-list file: 'n m' header then one 'u v' pair per line")
        sp.add_argument("--max-exact-n", type=int, default=DEFAULT_MAX_EXACT_N)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        return sp

    graph_cmd("census", "subtree counts s_1..s_n").set_defaults(func=cmd_census)
    graph_cmd("prob", "exact spanning probability P(G)").set_defaults(func=cmd_prob)
    sp = graph_cmd("pairs", "pairs (subtree, spanning tree) with n-k subtree vertices")
    sp.add_argument("--k", type=int, required=True)
    sp.set_defaults(func=cmd_pairs)

    ex = sub.add_parser("experiment", help="run a named experiment")
    ex.add_argument("name", choices=sorted(EXPERIMENTS))
    ex.add_argument("--config", help="flat key = value file; flags override it")
    ex.add_argument("--n", nargs="+", help="grid of orders")
    ex.add_argument("--p", nargs="+", help="edge probabilities, or schedule coefficients c")
    ex.add_argument("--schedule", choices=("constant", "clogn", "csqrt"))
    ex.add_argument("--trials", type=int)
    ex.add_argument("--seed", type=int)
    ex.add_argument("--k", type=int, help="largest k for ratio and pair sweeps")
    ex.add_argument("--depth", type=int, help="interval depth K (0 = largest within budget)")
    ex.add_argument("--clique", nargs="+")
    ex.add_argument("--path-len", dest="path_len", nargs="+")
    ex.add_argument("--budget", type=int)
    ex.add_argument("--out")
    ex.add_argument("--format", choices=("csv", "json"))
    ex.add_argument("--threads", type=int)
    ex.add_argument("--max-exact-n", type=int)
    ex.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:  # GraphError, caps and budgets are ValueErrors
        print(f"subtree: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
