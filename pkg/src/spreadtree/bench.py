"""Seeded random graphs and the tree-building / ranking timing harness."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass

from .arborescence import build_mcwdst
from .graphio import GraphBuilder, WeightedDigraph
from .ranking import TimingStrategy, rank_tree

# (nodes, edges) of the three real-world subgraphs we benchmark against
REFERENCE_SIZES: tuple[tuple[int, int], ...] = ((978, 10_217), (5_210, 49_124), (10_210, 89_124))


def random_cost(rng: random.Random, high: float = 10.0) -> float:
    """Uniform draw from the half-open interval (0, high]."""
    return high * (1.0 - rng.random())


def random_digraph(n: int, m: int, seed: int, max_cost: float = 10.0) -> WeightedDigraph:
    """Uniform random simple digraph with ``n`` nodes and ``m`` distinct edges.

    Node ids are ``"0" .. "n-1"``, all registered up front so dense index
    equals the integer id.  Costs are uniform in ``(0, max_cost]``.
    """
    if n < 1:
        raise ValueError("need at least one node")
    if not 0 <= m <= n * (n - 1):
        raise ValueError(f"{m} edges do not fit in a simple digraph on {n} nodes")
    rng = random.Random(seed)
    builder = GraphBuilder()
    for i in range(n):
        builder.add_node(str(i))
    seen: set[tuple[int, int]] = set()
    while len(seen) < m:
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u == v or (u, v) in seen:
            continue
        seen.add((u, v))
        builder.add_edge(str(u), str(v), random_cost(rng, max_cost))
    return builder.build()


@dataclass(frozen=True)
class BenchRow:
    nodes: int
    edges: int
    tree_nodes: int
    tree_seconds: float
    ranking_seconds: float


def bench_one(n: int, m: int, seed: int, strategy: TimingStrategy | str = "average", root: str = "0") -> BenchRow:
    graph = random_digraph(n, m, seed)
    t0 = time.perf_counter()
    tree = build_mcwdst(graph, root)
    t1 = time.perf_counter()
    rank_tree(tree, strategy)
    t2 = time.perf_counter()
    return BenchRow(n, m, len(tree), t1 - t0, t2 - t1)


def run_bench(sizes, seed: int = 0, strategy: TimingStrategy | str = "average") -> list[BenchRow]:
    """Time tree construction and ranking for each ``(nodes, edges)`` size."""
    return [bench_one(n, m, seed, strategy) for n, m in sizes]


def format_bench(rows: list[BenchRow]) -> str:
    header = f"{'nodes':>8} {'edges':>8} {'tree':>8} {'MCWDST (s)':>11} {'Ranking (s)':>12}"
    lines = [header]
    for r in rows:
        lines.append(
            f"{r.nodes:>8} {r.edges:>8} {r.tree_nodes:>8} {r.tree_seconds:>11.4f} {r.ranking_seconds:>12.4f}"
        )
    return "\n".join(lines) + "\n"
