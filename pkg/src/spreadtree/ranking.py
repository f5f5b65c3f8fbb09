"""Harmfulness scores for the nodes of a propagation tree.

Every member ``n`` is scored as::

    rank(n) = H(n) + A(n) + (1 - f_t(n))

* ``H`` is the height of ``n``'s subtree divided by the height of the tree;
* ``A`` is the number of proper descendants of ``n`` divided by that of the
  root;
* ``f_t`` summarises the latencies on ``n``'s outgoing tree edges, using one
  of three :class:`TimingStrategy` variants.  Leaves get ``f_t = 0``.

Leaves therefore always score exactly 1.  Sorting members by descending
score gives the blocking order.
"""

from __future__ import annotations

import statistics
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum

from .arborescence import PropagationTree

__all__ = [
    "TimingStrategy",
    "NodeScore",
    "HarmReport",
    "BucketDistribution",
    "subtree_height",
    "subtree_area",
    "normalize_timestamps",
    "timing_term",
    "rank_node",
    "rank_tree",
    "top_k",
    "bucket_distribution",
    "bucket_table",
]


class TimingStrategy(str, Enum):
    AVERAGE = "average"
    MEDIAN = "median"
    RATIO = "ratio"

    @classmethod
    def parse(cls, value: "str | TimingStrategy") -> "TimingStrategy":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            choices = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown timing strategy {value!r} (choose from {choices})") from None

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class NodeScore:
    node: str
    index: int
    height: float
    area: float
    timing: float
    rank: float


@dataclass(frozen=True)
class HarmReport:
    """Scores for every tree member, highest rank first.

    ``tree_height`` is the height of the whole tree in edges and
    ``tree_area`` the number of proper descendants of the root.
    """

    root: str
    scores: tuple[NodeScore, ...]
    strategy: TimingStrategy
    tree_height: int
    tree_area: int

    def __len__(self) -> int:
        return len(self.scores)

    def __iter__(self):
        return iter(self.scores)

    @property
    def blocking_order(self) -> list[str]:
        return [s.node for s in self.scores]

    def score_of(self, node: str) -> NodeScore:
        for s in self.scores:
            if s.node == node:
                return s
        raise KeyError(node)


class _Shape:
    """Subtree heights and sizes for every member, computed bottom-up once."""

    __slots__ = ("height", "area")

    def __init__(self, tree: PropagationTree):
        kids = tree.children_indices
        height: dict[int, int] = {}
        area: dict[int, int] = {}
        for u in reversed(tree.bfs_order):
            h = 0
            a = 0
            for c in kids[u]:
                if height[c] + 1 > h:
                    h = height[c] + 1
                a += area[c] + 1
            height[u] = h
            area[u] = a
        self.height = height
        self.area = area


def _shape(tree: PropagationTree) -> _Shape:
    # PropagationTree is immutable, so the shape can live on the instance.
    shape = tree.__dict__.get("_rank_shape")
    if shape is None:
        shape = _Shape(tree)
        tree.__dict__["_rank_shape"] = shape
    return shape


def subtree_height(tree: PropagationTree, node: str) -> int:
    """Longest edge count from ``node`` down to a leaf (0 for leaves)."""
    return _shape(tree).height[tree.index_of(node)]


def subtree_area(tree: PropagationTree, node: str) -> int:
    """Number of proper descendants of ``node`` (0 for leaves)."""
    return _shape(tree).area[tree.index_of(node)]


def normalize_timestamps(costs: Sequence[float]) -> list[float]:
    """Min-max scale ``costs`` into [0, 1]; all 0.5 when every cost is equal.

    >>> normalize_timestamps([1.0, 2.0, 3.0])
    [0.0, 0.5, 1.0]
    >>> normalize_timestamps([3.0, 3.0])
    [0.5, 0.5]
    """
    if not costs:
        raise ValueError("cannot normalize an empty list of timestamps")
    lo = min(costs)
    hi = max(costs)
    if lo == hi:
        return [0.5] * len(costs)
    span = hi - lo
    return [(t - lo) / span for t in costs]


def _timing(costs: list[float], strategy: TimingStrategy) -> float:
    if not costs:
        return 0.0
    if strategy is TimingStrategy.RATIO:
        # raw costs: after min-max scaling min/max would always be 0
        return min(costs) / max(costs)
    normalized = normalize_timestamps(costs)
    if strategy is TimingStrategy.AVERAGE:
        return sum(normalized) / len(normalized)
    return statistics.median(normalized)


def timing_term(tree: PropagationTree, node: str, strategy: TimingStrategy | str) -> float:
    """Latency summary ``f_t`` over the costs of ``node``'s child edges.

    ``average`` and ``median`` work on min-max normalised costs, ``ratio``
    is ``min / max`` of the raw costs.  Leaves give 0.
    """
    strategy = TimingStrategy.parse(strategy)
    return _timing(tree.child_costs(tree.index_of(node)), strategy)


def _score(tree: PropagationTree, shape: _Shape, i: int, strategy: TimingStrategy) -> NodeScore:
    r = tree.root_index
    h_root = shape.height[r]
    a_root = shape.area[r]
    h = shape.height[i] / h_root if h_root else 0.0
    a = shape.area[i] / a_root if a_root else 0.0
    f = _timing(tree.child_costs(i), strategy)
    return NodeScore(tree.id_of(i), i, h, a, f, h + a + (1.0 - f))


def rank_node(tree: PropagationTree, node: str, strategy: TimingStrategy | str) -> NodeScore:
    """Score a single member of ``tree``."""
    strategy = TimingStrategy.parse(strategy)
    return _score(tree, _shape(tree), tree.index_of(node), strategy)


def rank_tree(tree: PropagationTree, strategy: TimingStrategy | str) -> HarmReport:
    """Score every member and sort by rank, ties by ascending dense index."""
    strategy = TimingStrategy.parse(strategy)
    shape = _shape(tree)
    scores = [_score(tree, shape, i, strategy) for i in tree.member_indices]
    scores.sort(key=lambda s: (-s.rank, s.index))
    r = tree.root_index
    return HarmReport(
        root=tree.root,
        scores=tuple(scores),
        strategy=strategy,
        tree_height=shape.height[r],
        tree_area=shape.area[r],
    )


def top_k(report: HarmReport, k: int) -> list[NodeScore]:
    """The ``k`` most harmful nodes (fewer if the tree is smaller)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return list(report.scores[:k])


@dataclass(frozen=True)
class BucketDistribution:
    """Share of scored nodes in the (1, 2] and (2, 3] rank intervals.

    The two fractions are taken over nodes ranked strictly above 1.  Nodes
    scoring exactly 1 are only counted (``at_one``: every leaf, plus any
    interior node that lands on 1 exactly); so are nodes scoring below 1,
    which happens for interior nodes whose ``f_t`` exceeds ``H + A``.
    """

    mild: float
    severe: float
    at_one: int
    below_one: int
    total: int

    @property
    def counted(self) -> int:
        return self.total - self.at_one - self.below_one


def bucket_distribution(scores: HarmReport | Iterable[NodeScore]) -> BucketDistribution:
    mild = severe = at_one = below = total = 0
    for s in scores:
        total += 1
        if s.rank > 2.0:
            severe += 1
        elif s.rank > 1.0:
            mild += 1
        elif s.rank == 1.0:
            at_one += 1
        else:
            below += 1
    counted = mild + severe
    if counted == 0:
        return BucketDistribution(0.0, 0.0, at_one, below, total)
    return BucketDistribution(mild / counted, severe / counted, at_one, below, total)


def bucket_table(
    reports: Sequence[HarmReport],
    ks: Iterable[int],
    mode: str = "pooled",
) -> list[tuple[int, BucketDistribution]]:
    """Bucket distribution of the top-``k`` nodes across many trees.

    ``mode="pooled"`` merges every tree's scores, sorts them and takes the
    global top-``k``; ``mode="per_tree"`` takes each tree's own top-``k``
    and merges those.  Global ties are broken by report position, then
    dense index.
    """
    if mode not in ("pooled", "per_tree"):
        raise ValueError(f"mode must be 'pooled' or 'per_tree', got {mode!r}")
    rows = []
    pooled = None
    if mode == "pooled":
        pooled = sorted(
            ((s, t) for t, rep in enumerate(reports) for s in rep.scores),
            key=lambda st: (-st[0].rank, st[1], st[0].index),
        )
    for k in sorted(set(ks)):
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        if pooled is not None:
            chosen = [s for s, _ in pooled[:k]]
        else:
            chosen = [s for rep in reports for s in rep.scores[:k]]
        rows.append((k, bucket_distribution(chosen)))
    return rows
