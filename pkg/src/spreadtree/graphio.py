"""Weighted directed graphs and the text formats they are loaded from.

Two input formats are supported:

* a plain edge list, one ``src dst cost`` triple per line, ``#`` comments;
* Twitter15 propagation traces, one ``['uid', 'tweet', t]->['uid', 'tweet', t]``
  record per line.

Node ids are opaque strings.  Each node also gets a dense integer index in
order of first appearance; the index drives every tie-break downstream, so
parsing the same bytes twice always yields the same graph.
"""

from __future__ import annotations

import io
import math
import os
import re
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from pathlib import Path
from typing import TextIO

from .errors import (
    DuplicateEdge,
    DuplicateRoot,
    MalformedLine,
    MalformedTriple,
    MissingRoot,
    NegativeLatency,
    NonPositiveCost,
    ParseError,
    SelfLoop,
    UnknownNode,
)

__all__ = [
    "WeightedDigraph",
    "GraphBuilder",
    "parse_edge_list",
    "parse_twitter15_trace",
    "format_edge_list",
    "trace_node_id",
    "Twitter15Corpus",
    "load_twitter15_corpus",
]


class WeightedDigraph:
    """Immutable directed graph with strictly positive edge costs.

    Build one with :class:`GraphBuilder`, :meth:`from_edges` or one of the
    parsers.  ``root`` is only set by the Twitter15 parser, which knows the
    cascade source.
    """

    __slots__ = ("_ids", "_index", "_out", "_num_edges", "root")

    def __init__(self, ids, out, root: str | None = None):
        self._ids: tuple[str, ...] = tuple(ids)
        self._index: dict[str, int] = {n: i for i, n in enumerate(self._ids)}
        self._out: tuple[tuple[tuple[int, float], ...], ...] = tuple(tuple(adj) for adj in out)
        self._num_edges = sum(len(adj) for adj in self._out)
        self.root = root

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[str, str, float]],
        nodes: Iterable[str] = (),
        root: str | None = None,
    ) -> "WeightedDigraph":
        """Build a graph, validating every edge.

        ``nodes`` are registered first (in the given order), then edge
        endpoints in order of appearance.
        """
        builder = GraphBuilder()
        for n in nodes:
            builder.add_node(n)
        for u, v, c in edges:
            builder.add_edge(u, v, c)
        return builder.build(root=root)

    # -- sizes and lookups -------------------------------------------------

    @property
    def ids(self) -> tuple[str, ...]:
        return self._ids

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, node: object) -> bool:
        return node in self._index

    @property
    def num_nodes(self) -> int:
        return len(self._ids)

    @property
    def num_edges(self) -> int:
        return self._num_edges

    def index_of(self, node: str) -> int:
        try:
            return self._index[node]
        except KeyError:
            raise UnknownNode(node) from None

    def id_of(self, index: int) -> str:
        return self._ids[index]

    def out_adjacency(self) -> tuple[tuple[tuple[int, float], ...], ...]:
        """Out-edges per dense index as ``(dst_index, cost)`` pairs."""
        return self._out

    def successors(self, node: str) -> list[tuple[str, float]]:
        return [(self._ids[v], c) for v, c in self._out[self.index_of(node)]]

    def out_degree(self, node: str) -> int:
        return len(self._out[self.index_of(node)])

    def cost(self, src: str, dst: str) -> float:
        j = self.index_of(dst)
        for v, c in self._out[self.index_of(src)]:
            if v == j:
                return c
        raise KeyError(f"no edge {src!r} -> {dst!r}")

    def edges(self) -> Iterator[tuple[str, str, float]]:
        """All edges as id triples, grouped by source in dense-index order."""
        ids = self._ids
        for u, adj in enumerate(self._out):
            for v, c in adj:
                yield ids[u], ids[v], c

    def edge_set(self) -> set[tuple[str, str, float]]:
        return set(self.edges())

    def scaled(self, factor: float) -> "WeightedDigraph":
        """Same structure with every cost multiplied by ``factor`` (> 0)."""
        if not factor > 0:
            raise ValueError("scale factor must be positive")
        out = [[(v, c * factor) for v, c in adj] for adj in self._out]
        return WeightedDigraph(self._ids, out, root=self.root)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedDigraph):
            return NotImplemented
        return self._ids == other._ids and self._out == other._out and self.root == other.root

    def __hash__(self) -> int:
        return hash((self._ids, self._out, self.root))

    def __repr__(self) -> str:
        return f"WeightedDigraph(nodes={self.num_nodes}, edges={self.num_edges})"


class GraphBuilder:
    """Mutable accumulator that enforces the graph invariants edge by edge."""

    def __init__(self) -> None:
        self._ids: list[str] = []
        self._index: dict[str, int] = {}
        self._out: list[list[tuple[int, float]]] = []
        self._pairs: set[tuple[int, int]] = set()

    def add_node(self, node: str) -> int:
        i = self._index.get(node)
        if i is None:
            i = len(self._ids)
            self._index[node] = i
            self._ids.append(node)
            self._out.append([])
        return i

    def add_edge(self, src: str, dst: str, cost: float, lineno: int | None = None) -> None:
        if src == dst:
            raise SelfLoop(f"self-loop on {src!r}", lineno)
        if not cost > 0:
            raise NonPositiveCost(f"edge {src!r} -> {dst!r} has cost {cost!r}; costs must be > 0", lineno)
        if not math.isfinite(cost):
            raise MalformedLine(f"edge {src!r} -> {dst!r} has non-finite cost {cost!r}", lineno)
        u = self.add_node(src)
        v = self.add_node(dst)
        if (u, v) in self._pairs:
            raise DuplicateEdge(f"duplicate edge {src!r} -> {dst!r}", lineno)
        self._pairs.add((u, v))
        self._out[u].append((v, float(cost)))

    def build(self, root: str | None = None) -> WeightedDigraph:
        if root is not None and root not in self._index:
            raise UnknownNode(root)
        return WeightedDigraph(self._ids, self._out, root=root)


def _lines(source: str | TextIO) -> Iterator[tuple[int, str]]:
    stream = io.StringIO(source) if isinstance(source, str) else source
    for lineno, line in enumerate(stream, start=1):
        yield lineno, line.rstrip("\r\n")


def parse_edge_list(source: str | TextIO) -> WeightedDigraph:
    """Parse ``src dst cost`` lines into a graph.

    Everything after ``#`` is a comment; blank lines are skipped.  A line
    holding a single token declares an isolated node, which lets
    :func:`format_edge_list` round-trip graphs with edgeless vertices.

    >>> g = parse_edge_list("a b 1.5\\nb c 2.0")
    >>> g.num_nodes, g.num_edges, g.cost("a", "b")
    (3, 2, 1.5)
    """
    builder = GraphBuilder()
    for lineno, raw in _lines(source):
        line = raw.split("#", 1)[0]
        fields = line.split()
        if not fields:
            continue
        if len(fields) == 1:
            builder.add_node(fields[0])
            continue
        if len(fields) != 3:
            raise MalformedLine(f"expected 'src dst cost', got {raw.strip()!r}", lineno)
        src, dst, text = fields
        try:
            cost = float(text)
        except ValueError:
            raise MalformedLine(f"cost {text!r} is not a number", lineno) from None
        if math.isnan(cost):
            raise MalformedLine(f"cost {text!r} is not a number", lineno)
        builder.add_edge(src, dst, cost, lineno)
    return builder.build()


def format_edge_list(graph: WeightedDigraph) -> str:
    """Serialize a graph so that :func:`parse_edge_list` restores it exactly."""
    lines = []
    has_edge = [False] * graph.num_nodes
    for u, adj in enumerate(graph.out_adjacency()):
        for v, _ in adj:
            has_edge[u] = has_edge[v] = True
    for i, node in enumerate(graph.ids):
        if not has_edge[i]:
            lines.append(node)
    for u, v, c in graph.edges():
        lines.append(f"{u} {v} {c!r}")
    return "".join(line + "\n" for line in lines)


# ['uid', 'tweet_id', time] -- quotes around the time are tolerated because
# the public Twitter15 release writes it as a string.
_TRIPLE = r"\[\s*'([^']*)'\s*,\s*'([^']*)'\s*,\s*('?)([^,'\]\s]+)\3\s*\]"
_RECORD = re.compile(rf"^\s*{_TRIPLE}\s*->\s*{_TRIPLE}\s*$")

ROOT_MARKER = "ROOT"


def trace_node_id(uid: str, tweet_id: str) -> str:
    """Node id for a ``(uid, tweet_id)`` pair."""
    return f"{uid}:{tweet_id}"


def _parse_time(text: str, lineno: int) -> float:
    try:
        t = float(text)
    except ValueError:
        raise MalformedTriple(f"time {text!r} is not a number", lineno) from None
    if not math.isfinite(t) or t < 0:
        raise MalformedTriple(f"time {text!r} must be a finite non-negative number", lineno)
    return t


def parse_twitter15_trace(source: str | TextIO) -> WeightedDigraph:
    """Parse a Twitter15 propagation trace.

    Each ``(uid, tweet_id)`` pair becomes one node (id ``"uid:tweet_id"``)
    and each parent->child record an edge whose cost is the child's time
    minus the parent's.  The record whose parent uid is ``ROOT`` names the
    cascade source and contributes no edge; it ends up in ``graph.root``.
    """
    builder = GraphBuilder()
    root: str | None = None
    for lineno, raw in _lines(source):
        if not raw.strip():
            continue
        m = _RECORD.match(raw)
        if m is None:
            raise MalformedTriple(f"expected ['uid', 'tweet', t]->['uid', 'tweet', t], got {raw.strip()!r}", lineno)
        p_uid, p_tweet, _, p_time, c_uid, c_tweet, _, c_time = m.groups()
        parent_t = _parse_time(p_time, lineno)
        child_t = _parse_time(c_time, lineno)
        if child_t < parent_t:
            raise NegativeLatency(
                f"child time {child_t!r} precedes parent time {parent_t!r}", lineno
            )
        child = trace_node_id(c_uid, c_tweet)
        if p_uid == ROOT_MARKER:
            if root is not None and root != child:
                raise DuplicateRoot(f"second ROOT record ({child!r}); root is already {root!r}", lineno)
            root = child
            builder.add_node(child)
            continue
        builder.add_edge(trace_node_id(p_uid, p_tweet), child, child_t - parent_t, lineno)
    if root is None:
        raise MissingRoot("trace has no ROOT record")
    return builder.build(root=root)


@dataclass
class Twitter15Corpus:
    """Traces loaded from a Twitter15-style directory.

    ``graphs`` maps trace name (file stem) to graph; ``failures`` maps the
    names of traces that could not be parsed to the error message.
    """

    graphs: dict[str, WeightedDigraph] = field(default_factory=dict)
    failures: dict[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.graphs)


def read_labels(path: str | os.PathLike) -> dict[str, str]:
    """Read a ``label:tweet_id`` file into ``{tweet_id: label}``."""
    labels = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            label, sep, tweet = line.partition(":")
            if not sep or not tweet:
                raise MalformedLine(f"expected 'label:tweet_id', got {line!r}", lineno)
            labels[tweet.strip()] = label.strip()
    return labels


def load_twitter15_corpus(
    tree_dir: str | os.PathLike,
    label_file: str | os.PathLike | None = None,
    label: str | None = "false",
) -> Twitter15Corpus:
    """Load every ``<tweet_id>.txt`` trace in ``tree_dir``.

    With a ``label_file``, only traces whose label equals ``label`` are
    loaded (the default keeps the ``false`` articles).  Traces that fail to
    parse are recorded in ``failures`` rather than aborting the whole load.
    """
    tree_dir = Path(tree_dir)
    wanted = None
    if label_file is not None:
        labels = read_labels(label_file)
        wanted = {t for t, lab in labels.items() if label is None or lab == label}
    corpus = Twitter15Corpus()
    for path in sorted(tree_dir.glob("*.txt")):
        name = path.stem
        if wanted is not None and name not in wanted:
            continue
        try:
            with open(path, encoding="utf-8") as fh:
                corpus.graphs[name] = parse_twitter15_trace(fh)
        except ParseError as exc:
            corpus.failures[name] = str(exc)
    return corpus
