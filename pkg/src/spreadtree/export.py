"""Serializers for trees and harm reports: DOT, JSON and a plain tree list."""

from __future__ import annotations

import json
from collections.abc import Sequence

from .arborescence import PropagationTree
from .errors import InvalidTree
from .ranking import BucketDistribution, HarmReport

__all__ = ["export_dot", "format_tree", "report_to_dict", "report_to_json", "format_bucket_table"]


def _quote(node: str) -> str:
    return '"' + node.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(tree: PropagationTree, ranks: HarmReport | None = None) -> str:
    """Render ``tree`` as a Graphviz digraph.

    Nodes are emitted in dense-index order, labelled with their id and, when
    ``ranks`` is given, their score to 4 decimals.  Edge labels are costs.
    """
    if len(tree) == 0:
        raise InvalidTree("cannot export an empty tree")
    rank_of = {s.node: s.rank for s in ranks.scores} if ranks is not None else {}
    lines = ["digraph propagation_tree {"]
    for node in tree.members:
        label = node.replace("\\", "\\\\").replace('"', '\\"')
        if node in rank_of:
            label += f"\\n{rank_of[node]:.4f}"
        lines.append(f'  {_quote(node)} [label="{label}"];')
    for u, v, c in tree.edges():
        lines.append(f'  {_quote(u)} -> {_quote(v)} [label="{c!r}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def format_tree(tree: PropagationTree) -> str:
    """Tree as ``parent child cost dist`` lines under a ``# root`` header.

    Edges are listed breadth-first, so every parent appears before its
    children.
    """
    lines = [f"# root {tree.root}", "# parent child cost dist"]
    for i in tree.bfs_order[1:]:
        v = tree.id_of(i)
        lines.append(f"{tree.parent_of(v)} {v} {tree.edge_cost(v)!r} {tree.distance(v)!r}")
    return "\n".join(lines) + "\n"


def _sig9(x: float) -> float:
    return float(f"{x:.9g}")


def report_to_dict(report: HarmReport, k: int | None = None) -> dict:
    scores = report.scores if k is None else report.scores[:k]
    return {
        "strategy": report.strategy.value,
        "root": report.root,
        "tree": {
            "nodes": len(report.scores),
            "height": report.tree_height,
            "area": report.tree_area,
        },
        "k": k,
        "scores": [
            {
                "node": s.node,
                "H": _sig9(s.height),
                "A": _sig9(s.area),
                "f_t": _sig9(s.timing),
                "rank": _sig9(s.rank),
            }
            for s in scores
        ],
    }


def report_to_json(report: HarmReport, k: int | None = None) -> str:
    """JSON blocking order, optionally truncated to the top ``k``."""
    return json.dumps(report_to_dict(report, k), indent=2) + "\n"


def format_bucket_table(rows: Sequence[tuple[int, str, BucketDistribution]]) -> str:
    """Plain-text table of ``(k, strategy, distribution)`` rows."""
    header = f"{'k':>6}  {'f_t':<8} {'% in (1,2]':>10} {'% in (2,3]':>10} {'=1':>6} {'<1':>6}"
    lines = [header, "-" * len(header)]
    for k, strategy, dist in rows:
        lines.append(
            f"{k:>6}  {strategy:<8} {100 * dist.mild:>10.2f} {100 * dist.severe:>10.2f}"
            f" {dist.at_one:>6} {dist.below_one:>6}"
        )
    return "\n".join(lines) + "\n"
