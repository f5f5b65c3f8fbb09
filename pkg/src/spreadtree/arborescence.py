"""Propagation trees: the cheapest-arrival arborescence rooted at a source.

:func:`build_mcwdst` grows the tree level by level from the root.  Each round
takes the set of frontier vertices, inspects their out-edges, attaches newly
seen vertices and re-parents known ones when the new route reaches them
strictly earlier.  A re-parented vertex joins the next frontier so that its
own descendants get re-examined; the loop stops once a round changes
nothing.  With positive costs that takes at most ``|V|`` rounds, so the total
number of edge inspections stays within ``|V| * |E|``.

:func:`oracle_shortest_path_tree` is an independent label-setting (Dijkstra)
computation used to check the builder's distances.
"""

from __future__ import annotations

import heapq
from collections import deque
from collections.abc import Iterable
from functools import cached_property

from .errors import InvalidTree, UnknownNode, UnknownRoot
from .graphio import WeightedDigraph

__all__ = [
    "IMPROVEMENT_TOL",
    "PropagationTree",
    "build_mcwdst",
    "oracle_shortest_path_tree",
    "iteration_count",
]

# A new route must beat the incumbent by more than this to replace it.
IMPROVEMENT_TOL = 1e-9


class PropagationTree:
    """Arborescence rooted at a source node.

    Nodes are stored by dense index (shared with the graph the tree came
    from); the public accessors take and return node ids.

    Attributes
    ----------
    root : str
        Id of the source node.
    inspections : int
        Edge inspections performed while building (0 for trees built with
        :meth:`from_edges`).
    rounds : int
        Frontier rounds executed while building.
    """

    def __init__(self, ids, root, parent, edge_cost, dist, inspections=0, rounds=0):
        self._ids: tuple[str, ...] = tuple(ids)
        self._root: int = root
        self._parent: dict[int, int] = parent
        self._edge_cost: dict[int, float] = edge_cost
        self._dist: dict[int, float] = dist
        self.inspections = inspections
        self.rounds = rounds

    @classmethod
    def from_edges(
        cls, root: str, edges: Iterable[tuple[str, str, float]]
    ) -> "PropagationTree":
        """Build a tree directly from ``(parent, child, cost)`` triples.

        Dense indices follow first appearance, root first.  Raises
        :class:`InvalidTree` unless the edges form an arborescence rooted at
        ``root`` with positive costs.
        """
        ids = [root]
        index = {root: 0}
        parent: dict[int, int] = {}
        edge_cost: dict[int, float] = {}
        for u, v, c in edges:
            for n in (u, v):
                if n not in index:
                    index[n] = len(ids)
                    ids.append(n)
            i, j = index[u], index[v]
            if j == 0:
                raise InvalidTree(f"edge {u!r} -> {v!r} points into the root")
            if j in parent:
                raise InvalidTree(f"node {v!r} has two parents")
            if not c > 0:
                raise InvalidTree(f"edge {u!r} -> {v!r} has non-positive cost {c!r}")
            parent[j] = i
            edge_cost[j] = float(c)

        children: dict[int, list[int]] = {}
        for j, i in parent.items():
            children.setdefault(i, []).append(j)
        dist = {0: 0.0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in children.get(u, ()):
                dist[v] = dist[u] + edge_cost[v]
                queue.append(v)
        if len(dist) != len(ids):
            missing = sorted(ids[i] for i in range(len(ids)) if i not in dist)
            raise InvalidTree(f"nodes not reachable from root {root!r}: {missing}")
        return cls(ids, 0, parent, edge_cost, dist)

    # -- basic accessors ---------------------------------------------------

    @property
    def root(self) -> str:
        return self._ids[self._root]

    @property
    def root_index(self) -> int:
        return self._root

    def __len__(self) -> int:
        return len(self._dist)

    def __contains__(self, node: object) -> bool:
        i = self._lookup.get(node)  # type: ignore[arg-type]
        return i is not None and i in self._dist

    @cached_property
    def _lookup(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self._ids)}

    def index_of(self, node: str) -> int:
        """Dense index of a tree member; :class:`UnknownNode` otherwise."""
        i = self._lookup.get(node)
        if i is None or i not in self._dist:
            raise UnknownNode(node)
        return i

    def id_of(self, index: int) -> str:
        return self._ids[index]

    @cached_property
    def member_indices(self) -> tuple[int, ...]:
        return tuple(sorted(self._dist))

    @property
    def members(self) -> list[str]:
        """Member ids in dense-index order."""
        return [self._ids[i] for i in self.member_indices]

    def distance(self, node: str) -> float:
        return self._dist[self.index_of(node)]

    def distances(self) -> dict[str, float]:
        return {self._ids[i]: self._dist[i] for i in self.member_indices}

    def parent_of(self, node: str) -> str | None:
        p = self._parent.get(self.index_of(node))
        return None if p is None else self._ids[p]

    def edge_cost(self, node: str) -> float | None:
        """Cost of the tree edge entering ``node`` (``None`` for the root)."""
        return self._edge_cost.get(self.index_of(node))

    def edges(self) -> list[tuple[str, str, float]]:
        """Tree edges ``(parent, child, cost)`` ordered by child index."""
        ids = self._ids
        return [(ids[self._parent[v]], ids[v], self._edge_cost[v]) for v in sorted(self._parent)]

    # -- structure used by the ranking code --------------------------------

    @cached_property
    def children_indices(self) -> dict[int, tuple[int, ...]]:
        kids: dict[int, list[int]] = {i: [] for i in self._dist}
        for v in sorted(self._parent):
            kids[self._parent[v]].append(v)
        return {i: tuple(c) for i, c in kids.items()}

    def children_of(self, node: str) -> list[str]:
        return [self._ids[c] for c in self.children_indices[self.index_of(node)]]

    def child_costs(self, index: int) -> list[float]:
        return [self._edge_cost[c] for c in self.children_indices[index]]

    @cached_property
    def bfs_order(self) -> tuple[int, ...]:
        """Members in breadth-first order from the root."""
        kids = self.children_indices
        order = [self._root]
        for u in order:
            order.extend(kids[u])
        return tuple(order)

    def is_leaf(self, node: str) -> bool:
        return not self.children_indices[self.index_of(node)]

    def scaled(self, factor: float) -> "PropagationTree":
        """Same shape with every edge cost multiplied by ``factor``."""
        if not factor > 0:
            raise ValueError("scale factor must be positive")
        return PropagationTree(
            self._ids,
            self._root,
            dict(self._parent),
            {v: c * factor for v, c in self._edge_cost.items()},
            {v: d * factor for v, d in self._dist.items()},
        )

    def __repr__(self) -> str:
        return f"PropagationTree(root={self.root!r}, nodes={len(self)})"


def build_mcwdst(graph: WeightedDigraph, root: str) -> PropagationTree:
    """Build the minimum-cost weighted directed spanning tree rooted at ``root``.

    Only vertices reachable from ``root`` become members.  Edges pointing
    into ``root`` are dropped before the first round.  Frontier vertices are
    processed in ascending dense index and a vertex keeps its current parent
    unless a new route is cheaper by more than :data:`IMPROVEMENT_TOL`.

    Raises
    ------
    UnknownRoot
        If ``root`` is not a node of ``graph``.
    """
    if root not in graph:
        raise UnknownRoot(root)
    r = graph.index_of(root)
    out = graph.out_adjacency()

    dist: dict[int, float] = {r: 0.0}
    parent: dict[int, int] = {}
    edge_cost: dict[int, float] = {}
    frontier = [r]
    inspections = 0
    rounds = 0
    while frontier:
        rounds += 1
        next_frontier: set[int] = set()
        for n in frontier:
            dn = dist[n]
            for v, c in out[n]:
                if v == r:
                    continue
                inspections += 1
                via = dn + c
                old = dist.get(v)
                if old is None or via < old - IMPROVEMENT_TOL:
                    dist[v] = via
                    parent[v] = n
                    edge_cost[v] = c
                    next_frontier.add(v)
        frontier = sorted(next_frontier)

    return PropagationTree(graph.ids, r, parent, edge_cost, dist, inspections, rounds)


def iteration_count(graph: WeightedDigraph, root: str) -> int:
    """Number of edge inspections :func:`build_mcwdst` performs for ``root``."""
    return build_mcwdst(graph, root).inspections


def oracle_shortest_path_tree(graph: WeightedDigraph, root: str) -> dict[str, float]:
    """Exact single-source shortest path costs from ``root`` (Dijkstra)."""
    if root not in graph:
        raise UnknownRoot(root)
    src = graph.index_of(root)
    out = graph.out_adjacency()
    settled: dict[int, float] = {}
    heap = [(0.0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in settled:
            continue
        settled[u] = d
        for v, c in out[u]:
            if v not in settled:
                heapq.heappush(heap, (d + c, v))
    return {graph.id_of(i): d for i, d in settled.items()}
