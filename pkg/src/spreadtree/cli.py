"""Command-line entry point.

Exit codes: 0 success, 1 I/O error, 2 parse or usage error, 3 unknown root
or node.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .arborescence import build_mcwdst
from .bench import REFERENCE_SIZES, format_bench, run_bench
from .errors import ParseError, SpreadTreeError, UnknownNode
from .export import export_dot, format_bucket_table, format_tree, report_to_json
from .graphio import WeightedDigraph, load_twitter15_corpus, parse_edge_list, parse_twitter15_trace
from .ranking import TimingStrategy, bucket_table, rank_tree
from .simulate import compare_policies

EXIT_OK = 0
EXIT_IO = 1
EXIT_PARSE = 2
EXIT_SEMANTIC = 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _strategies(text: str) -> list[TimingStrategy]:
    if text == "all":
        return list(TimingStrategy)
    try:
        return [TimingStrategy.parse(part.strip()) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _sizes(text: str) -> list[tuple[int, int | None]]:
    sizes = []
    for part in text.split(","):
        n, _, m = part.strip().partition(":")
        try:
            sizes.append((int(n), int(m) if m else None))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad size {part!r}; use N or N:M") from None
    return sizes


def _horizon(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("horizon must be positive")
    return value


def load_graph(path: str, fmt: str) -> WeightedDigraph:
    try:
        with open(path, encoding="utf-8") as fh:
            if fmt == "twitter15":
                return parse_twitter15_trace(fh)
            return parse_edge_list(fh)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}", EXIT_IO) from None
    except ParseError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None


def _root(args, graph: WeightedDigraph) -> str:
    root = args.root if args.root is not None else graph.root
    if root is None:
        raise CliError("--root is required for edge-list input", EXIT_PARSE)
    if root not in graph:
        raise CliError(f"unknown root: {root!r}", EXIT_SEMANTIC)
    return root


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc.strerror or exc}", EXIT_IO) from None


def cmd_build_tree(args) -> int:
    graph = load_graph(args.input, args.format)
    tree = build_mcwdst(graph, _root(args, graph))
    if args.out_format == "dot":
        text = export_dot(tree, rank_tree(tree, args.strategy or TimingStrategy.AVERAGE))
    else:
        text = format_tree(tree)
    _write(text, args.out)
    return EXIT_OK


def cmd_rank(args) -> int:
    graph = load_graph(args.input, args.format)
    tree = build_mcwdst(graph, _root(args, graph))
    report = rank_tree(tree, args.strategy)
    if args.k is not None and args.k < 1:
        raise CliError("--k must be >= 1", EXIT_PARSE)
    if args.out_format == "dot":
        text = export_dot(tree, report)
    else:
        text = report_to_json(report, args.k)
    _write(text, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    graph = load_graph(args.input, args.format)
    root = _root(args, graph)
    policies = [p.strip() for p in args.policies.split(",") if p.strip()]
    if "random" in policies and args.seed is None:
        raise CliError("--seed is required when the random policy is compared", EXIT_PARSE)
    try:
        table = compare_policies(
            graph,
            root,
            args.k,
            args.strategy,
            policies=policies,
            seed=args.seed or 0,
            horizon=args.horizon,
        )
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    _write(table.to_csv(), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    sizes = []
    for n, m in args.sizes:
        if n < 1:
            raise CliError("sizes must be >= 1", EXIT_PARSE)
        if m is None:
            m = min(round(n * args.density), n * (n - 1))
        sizes.append((n, m))
    try:
        rows = run_bench(sizes, seed=args.seed or 0, strategy=args.strategy or TimingStrategy.AVERAGE)
    except MemoryError:
        raise CliError("out of memory while generating benchmark graphs", EXIT_IO) from None
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    _write(format_bench(rows), args.out)
    return EXIT_OK


def cmd_buckets(args) -> int:
    corpus = load_twitter15_corpus(args.input, args.labels, args.label)
    for name, msg in sorted(corpus.failures.items()):
        print(f"skipped {name}: {msg}", file=sys.stderr)
    if not corpus.graphs:
        raise CliError(f"no usable traces under {args.input}", EXIT_IO)
    rows = []
    for strategy in args.strategy:
        reports = []
        for name, graph in corpus.graphs.items():
            reports.append(rank_tree(build_mcwdst(graph, graph.root), strategy))
        for k, dist in bucket_table(reports, args.k, mode=args.mode):
            rows.append((k, strategy.value, dist))
    rows.sort(key=lambda r: (r[0], list(TimingStrategy).index(TimingStrategy(r[1]))))
    header = f"# {len(corpus.graphs)} traces, mode={args.mode}\n"
    _write(header + format_bucket_table(rows), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spreadtree",
        description="Propagation trees, harmfulness ranking and blocking simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def graph_args(p):
        p.add_argument("--input", required=True, help="graph file")
        p.add_argument("--format", choices=["edgelist", "twitter15"], default="edgelist")
        p.add_argument("--root", help="flagged source node (defaults to the trace root for twitter15)")
        p.add_argument("--out", help="output path (default: stdout)")

    p = sub.add_parser("build-tree", help="build the propagation tree rooted at the source")
    graph_args(p)
    p.add_argument("--out-format", choices=["edgelist", "dot"], default="edgelist")
    p.add_argument("--strategy", type=TimingStrategy.parse, help="strategy used for DOT rank labels")
    p.set_defaults(func=cmd_build_tree)

    p = sub.add_parser("rank", help="rank tree nodes by harmfulness")
    graph_args(p)
    p.add_argument("--strategy", type=TimingStrategy.parse, required=True, choices=list(TimingStrategy))
    p.add_argument("--k", type=int, help="keep only the top k nodes")
    p.add_argument("--out-format", choices=["json", "dot"], default="json")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("simulate", help="compare blocking policies by nodes saved")
    graph_args(p)
    p.add_argument("--strategy", type=_strategies, required=True, help="comma list or 'all'")
    p.add_argument("--k", type=_int_list, default=[5, 10, 15, 20], help="comma-separated k grid")
    p.add_argument("--policies", default="ranked,outdegree", help="subset of ranked,random,outdegree")
    p.add_argument("--seed", type=int, help="seed for the random policy")
    p.add_argument("--horizon", type=_horizon, default=math.inf)
    p.add_argument("--out-format", choices=["csv"], default="csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="time tree building and ranking on random graphs")
    p.add_argument(
        "--sizes",
        type=_sizes,
        default=list(REFERENCE_SIZES),
        help="comma list of N or N:M (default: 978:10217,5210:49124,10210:89124)",
    )
    p.add_argument("--density", type=float, default=9.0, help="edges per node when M is omitted")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strategy", type=TimingStrategy.parse)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("buckets", help="rank-interval table over a Twitter15 corpus")
    p.add_argument("--input", required=True, help="directory of <tweet_id>.txt traces")
    p.add_argument("--labels", help="label.txt file; restricts to --label")
    p.add_argument("--label", default="false")
    p.add_argument("--strategy", type=_strategies, default=list(TimingStrategy))
    p.add_argument("--k", type=_int_list, default=[1000, 2000, 3000])
    p.add_argument("--mode", choices=["pooled", "per_tree"], default="pooled")
    p.add_argument("--out")
    p.set_defaults(func=cmd_buckets)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except UnknownNode as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC
    except SpreadTreeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
