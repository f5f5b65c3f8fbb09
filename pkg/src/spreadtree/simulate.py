"""Earliest-arrival diffusion with blocked nodes, and blocking-policy comparison.

Content leaves the source at time 0 and crosses each edge after the edge's
latency.  A node is reached at the earliest time any unblocked path delivers
it; blocked nodes neither receive nor forward.  There is no randomness in the
spread itself: only :class:`RandomK` draws anything, from its own seed.
"""

from __future__ import annotations

import csv
import heapq
import io
import math
import random
from collections.abc import Collection, Iterable, Sequence
from dataclasses import dataclass, field
from typing import Union

from .arborescence import PropagationTree, build_mcwdst
from .errors import SourceBlocked, UnknownSource
from .graphio import WeightedDigraph
from .ranking import HarmReport, TimingStrategy, rank_tree

__all__ = [
    "DiffusionOutcome",
    "RankedTopK",
    "RandomK",
    "OutDegreeK",
    "BlockingPolicy",
    "simulate_diffusion",
    "select_blocked",
    "evaluate_policy",
    "PolicyTable",
    "compare_policies",
    "derive_seed",
]


@dataclass(frozen=True)
class DiffusionOutcome:
    """Result of one simulated spread.

    ``saved`` counts nodes that the same spread reaches when nothing is
    blocked but that are not reached now.
    """

    reached: frozenset[str]
    arrival: dict[str, float]
    blocked: frozenset[str]
    saved: int


@dataclass(frozen=True)
class RankedTopK:
    strategy: TimingStrategy
    k: int

    @property
    def label(self) -> str:
        return f"ranked:{TimingStrategy.parse(self.strategy).value}"


@dataclass(frozen=True)
class RandomK:
    k: int
    seed: int

    label = "random"


@dataclass(frozen=True)
class OutDegreeK:
    k: int

    label = "outdegree"


BlockingPolicy = Union[RankedTopK, RandomK, OutDegreeK]


def _arrivals(out, src: int, blocked: set[int], horizon: float) -> dict[int, float]:
    arrival: dict[int, float] = {}
    heap = [(0.0, src)]
    while heap:
        t, u = heapq.heappop(heap)
        if u in arrival:
            continue
        arrival[u] = t
        for v, c in out[u]:
            if v in blocked or v in arrival:
                continue
            tv = t + c
            if tv <= horizon:
                heapq.heappush(heap, (tv, v))
    return arrival


def simulate_diffusion(
    graph: WeightedDigraph,
    source: str,
    blocked: Iterable[str] = (),
    horizon: float = math.inf,
) -> DiffusionOutcome:
    """Spread from ``source`` until ``horizon``, never entering ``blocked``.

    Raises
    ------
    UnknownSource
        ``source`` is not in the graph.
    SourceBlocked
        ``source`` is itself in ``blocked``.
    UnknownNode
        A blocked node is not in the graph.
    """
    if source not in graph:
        raise UnknownSource(source)
    if not horizon > 0:
        raise ValueError(f"horizon must be positive, got {horizon!r}")
    blocked = frozenset(blocked)
    if source in blocked:
        raise SourceBlocked(f"source {source!r} cannot be blocked")
    blocked_idx = {graph.index_of(b) for b in blocked}
    src = graph.index_of(source)
    out = graph.out_adjacency()

    arrival = _arrivals(out, src, blocked_idx, horizon)
    baseline = len(arrival) if not blocked_idx else len(_arrivals(out, src, set(), horizon))
    return DiffusionOutcome(
        reached=frozenset(graph.id_of(i) for i in arrival),
        arrival={graph.id_of(i): t for i, t in arrival.items()},
        blocked=blocked,
        saved=baseline - len(arrival),
    )


def _ranked_candidates(report: HarmReport, source: str) -> list[str]:
    return [s.node for s in report.scores if s.node != source]


def _outdegree_candidates(graph: WeightedDigraph, tree: PropagationTree) -> list[str]:
    out = graph.out_adjacency()
    idx = [i for i in tree.member_indices if i != tree.root_index]
    idx.sort(key=lambda i: (-len(out[i]), i))
    return [graph.id_of(i) for i in idx]


def select_blocked(
    graph: WeightedDigraph,
    source: str,
    policy: BlockingPolicy,
    tree: PropagationTree | None = None,
) -> list[str]:
    """Nodes ``policy`` would block, most important first.

    Every policy picks among the nodes reachable from ``source`` and never
    picks the source itself.
    """
    if policy.k < 0:
        raise ValueError(f"k must be >= 0, got {policy.k}")
    if source not in graph:
        raise UnknownSource(source)
    if tree is None:
        tree = build_mcwdst(graph, source)
    if isinstance(policy, RankedTopK):
        order = _ranked_candidates(rank_tree(tree, policy.strategy), source)
    elif isinstance(policy, OutDegreeK):
        order = _outdegree_candidates(graph, tree)
    elif isinstance(policy, RandomK):
        pool = [graph.id_of(i) for i in tree.member_indices if i != tree.root_index]
        rng = random.Random(policy.seed)
        return rng.sample(pool, min(policy.k, len(pool)))
    else:
        raise TypeError(f"unsupported policy {policy!r}")
    return order[: policy.k]


def evaluate_policy(
    graph: WeightedDigraph,
    source: str,
    policy: BlockingPolicy,
    horizon: float = math.inf,
) -> tuple[int, frozenset[str]]:
    """Block what ``policy`` selects and report ``(saved, blocked)``."""
    blocked = select_blocked(graph, source, policy)
    outcome = simulate_diffusion(graph, source, blocked, horizon)
    return outcome.saved, outcome.blocked


def derive_seed(master: int, run: int) -> int:
    """Per-run seed for Monte-Carlo repetitions, fixed by ``master``."""
    return random.Random(f"{master}/{run}").getrandbits(63)


@dataclass
class PolicyTable:
    """Saved/reached counts for each ``(k, policy)`` cell.

    ``saved[k][column]`` gives the matrix view; :meth:`to_csv` writes one
    row per cell.
    """

    ks: list[int]
    columns: list[str]
    saved: dict[int, dict[str, int]] = field(default_factory=dict)
    reached: dict[int, dict[str, int]] = field(default_factory=dict)

    def rows(self) -> list[tuple[int, str, str, int, int]]:
        out = []
        for k in self.ks:
            for col in self.columns:
                policy, _, strategy = col.partition(":")
                out.append((k, policy, strategy, self.saved[k][col], self.reached[k][col]))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "policy", "strategy", "saved", "reached"])
        writer.writerows(self.rows())
        return buf.getvalue()


def compare_policies(
    graph: WeightedDigraph,
    source: str,
    ks: Collection[int],
    strategies: Sequence[TimingStrategy | str] = tuple(TimingStrategy),
    *,
    policies: Sequence[str] = ("ranked", "random", "outdegree"),
    seed: int = 0,
    horizon: float = math.inf,
) -> PolicyTable:
    """Evaluate every requested policy at every ``k``.

    ``ks`` is deduplicated and sorted.  ``ranked`` expands into one column
    per strategy.  The random baseline draws with ``seed`` for every ``k``.
    """
    grid = sorted(set(ks))
    if not grid:
        raise ValueError("k grid is empty")
    if grid[0] < 0:
        raise ValueError(f"k must be >= 0, got {grid[0]}")
    unknown = set(policies) - {"ranked", "random", "outdegree"}
    if unknown:
        raise ValueError(f"unknown policies: {sorted(unknown)}")
    if source not in graph:
        raise UnknownSource(source)

    tree = build_mcwdst(graph, source)
    orders: dict[str, list[str]] = {}
    if "ranked" in policies:
        for strategy in strategies:
            strategy = TimingStrategy.parse(strategy)
            orders[f"ranked:{strategy.value}"] = _ranked_candidates(rank_tree(tree, strategy), source)
    if "outdegree" in policies:
        orders["outdegree"] = _outdegree_candidates(graph, tree)
    columns = list(orders)
    if "random" in policies:
        columns.append("random")

    table = PolicyTable(ks=grid, columns=columns)
    for k in grid:
        table.saved[k] = {}
        table.reached[k] = {}
        for col in columns:
            if col == "random":
                blocked = select_blocked(graph, source, RandomK(k, seed), tree)
            else:
                blocked = orders[col][:k]
            outcome = simulate_diffusion(graph, source, blocked, horizon)
            table.saved[k][col] = outcome.saved
            table.reached[k][col] = len(outcome.reached)
    return table
