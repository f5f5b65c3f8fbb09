import random
import statistics

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spreadtree.arborescence import PropagationTree
from spreadtree.errors import UnknownNode
from spreadtree.ranking import (
    TimingStrategy,
    bucket_distribution,
    bucket_table,
    normalize_timestamps,
    rank_node,
    rank_tree,
    subtree_area,
    subtree_height,
    timing_term,
    top_k,
)

from oracles import random_tree_edges, reference_rank

STRATEGIES = list(TimingStrategy)

CHAIN = PropagationTree.from_edges("r", [("r", "a", 1.0), ("a", "b", 1.0)])
CHAIN3 = PropagationTree.from_edges("r", [("r", "a", 1.0), ("a", "b", 1.0), ("b", "c", 1.0)])
SINGLE = PropagationTree.from_edges("r", [])


def star(n, cost=1.0):
    return PropagationTree.from_edges("r", [("r", f"x{i}", cost) for i in range(n)])


def fan(costs):
    return PropagationTree.from_edges("n", [("n", f"c{i}", c) for i, c in enumerate(costs)])


# -- shape ---------------------------------------------------------------------


def test_subtree_height():
    assert subtree_height(CHAIN3, "c") == 0
    assert subtree_height(CHAIN3, "r") == 3
    assert subtree_height(star(5), "r") == 1


def test_subtree_area():
    assert subtree_area(CHAIN3, "c") == 0
    assert subtree_area(CHAIN3, "r") == 3
    t = PropagationTree.from_edges("r", [("r", "m", 1.0), ("m", "x", 1.0), ("m", "y", 2.0)])
    assert subtree_area(t, "m") == 2


def test_unknown_node():
    with pytest.raises(UnknownNode):
        subtree_height(CHAIN, "zz")
    with pytest.raises(UnknownNode):
        rank_node(CHAIN, "zz", "average")


# -- timestamps ----------------------------------------------------------------


def test_normalize_examples():
    assert normalize_timestamps([3.0, 3.0, 3.0]) == [0.5, 0.5, 0.5]
    assert normalize_timestamps([1.0, 2.0, 3.0]) == [0.0, 0.5, 1.0]
    assert normalize_timestamps([7.0]) == [0.5]
    with pytest.raises(ValueError):
        normalize_timestamps([])


@given(st.lists(st.floats(min_value=1e-3, max_value=1e3), min_size=1, max_size=30))
def test_normalize_range(costs):
    out = normalize_timestamps(costs)
    assert len(out) == len(costs)
    assert all(0.0 <= x <= 1.0 for x in out)


def test_timing_examples():
    assert timing_term(fan([1, 2, 3]), "n", "average") == 0.5
    assert timing_term(fan([1, 2, 4]), "n", "ratio") == 0.25
    for s in STRATEGIES:
        assert timing_term(CHAIN, "b", s) == 0.0


def test_median_matches_middle_element():
    # independent median: middle of the sorted normalised values
    norm = sorted(normalize_timestamps([1.0, 2.0, 3.0]))
    assert norm[1] == 0.5
    assert timing_term(fan([3, 1, 2]), "n", "median") == 0.5
    # even count: mean of the two middles, cross-checked with statistics
    costs = [1.0, 2.0, 5.0, 9.0]
    expected = statistics.median(normalize_timestamps(costs))
    assert timing_term(fan(costs), "n", "median") == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx((1 / 8 + 4 / 8) / 2)


@pytest.mark.parametrize("k", [1, 2, 5])
@pytest.mark.parametrize("cost", [0.3, 1.0, 7.0])
def test_uniform_child_latencies(k, cost):
    t = fan([cost] * k)
    assert timing_term(t, "n", "average") == 0.5
    assert timing_term(t, "n", "median") == 0.5
    assert timing_term(t, "n", "ratio") == 1.0


def test_strategy_parse():
    assert TimingStrategy.parse("Median") is TimingStrategy.MEDIAN
    with pytest.raises(ValueError):
        TimingStrategy.parse("mode")


# -- scores ----------------------------------------------------------------------


def test_leaf_scores_one():
    for s in STRATEGIES:
        score = rank_node(CHAIN, "b", s)
        assert (score.height, score.area, score.timing, score.rank) == (0.0, 0.0, 0.0, 1.0)


def test_chain_root_score():
    score = rank_node(CHAIN, "r", "average")
    assert (score.height, score.area, score.timing) == (1.0, 1.0, 0.5)
    assert score.rank == 2.5
    assert reference_rank(CHAIN.edges(), "r", "r", "average")[3] == 2.5


def test_single_node_tree():
    report = rank_tree(SINGLE, "median")
    assert len(report) == 1
    assert report.scores[0].rank == 1.0
    assert report.tree_height == 0 and report.tree_area == 0


def test_chain_order():
    report = rank_tree(CHAIN, "average")
    assert report.blocking_order == ["r", "a", "b"]
    ranks = [s.rank for s in report.scores]
    assert ranks[0] > ranks[1] > ranks[2]


def test_deep_chain_child_outranks_shallow_children():
    edges = [("r", f"x{i}", 1.0) for i in range(4)]
    edges += [("r", "c", 1.0), ("c", "d", 1.0), ("d", "e", 1.0), ("e", "f", 1.0)]
    report = rank_tree(PropagationTree.from_edges("r", edges), "average")
    assert report.blocking_order[:3] == ["r", "c", "d"]
    # frozen from reference_rank on this instance
    assert report.score_of("c").rank == 1.625


def test_interior_nodes_can_score_below_leaves():
    # Under the formula an interior node whose f_t exceeds H + A lands below 1.
    edges = [("r", f"x{i}", 1.0) for i in range(4)]
    edges += [("r", "c", 1.0), ("c", "d", 1.0), ("d", "e", 1.0), ("e", "f", 1.0)]
    t = PropagationTree.from_edges("r", edges)
    e = rank_node(t, "e", "average")
    assert (e.height, e.area, e.timing) == (0.25, 0.125, 0.5)
    assert e.rank == 0.875
    # with ratio, a single-child node gets f_t = 1 and can land exactly on 1
    assert rank_node(CHAIN, "a", "ratio").rank == 1.0


def test_slow_root_can_be_outranked():
    # root fans out with normalised child latencies [0, 1, 1] (median f_t = 1)
    # while its fast child heads a long single-child chain
    edges = [("r", "a", 1.0), ("r", "b", 10.0), ("r", "c", 10.0), ("a", "a1", 1.0)]
    edges += [(f"a{i}", f"a{i + 1}", 1.0) for i in range(1, 10)]
    report = rank_tree(PropagationTree.from_edges("r", edges), "median")
    assert report.blocking_order[0] == "a"
    # frozen from reference_rank on this instance
    assert report.score_of("r").rank == 2.0
    assert report.score_of("a").rank == pytest.approx(2.1783216783216783, abs=1e-12)


def test_top_k():
    report = rank_tree(CHAIN, "average")
    assert [s.node for s in top_k(report, 1)] == ["r"]
    assert len(top_k(report, 10)) == 3
    assert top_k(report, 3) == list(report.scores)
    with pytest.raises(ValueError):
        top_k(report, 0)


def test_ties_broken_by_dense_index():
    report = rank_tree(star(4), "average")
    assert report.blocking_order == ["r", "x0", "x1", "x2", "x3"]


def _random_tree(seed, costs=None):
    rng = random.Random(seed)
    n = rng.randint(1, 120)
    return PropagationTree.from_edges("0", random_tree_edges(rng, n, costs))


@given(st.integers(min_value=0, max_value=2**32), st.sampled_from(STRATEGIES))
@settings(max_examples=150, deadline=None)
def test_scores_match_reference(seed, strategy):
    t = _random_tree(seed, costs=[1.0, 2.0, 3.0] if seed % 2 else None)
    edges = t.edges()
    for node in t.members:
        s = rank_node(t, node, strategy)
        H, A, f, rank = reference_rank(edges, "0", node, strategy.value)
        assert s.height == pytest.approx(H, abs=1e-12)
        assert s.area == pytest.approx(A, abs=1e-12)
        assert s.timing == pytest.approx(f, abs=1e-12)
        assert s.rank == pytest.approx(rank, abs=1e-12)


@given(st.integers(min_value=0, max_value=2**32), st.sampled_from(STRATEGIES))
@settings(max_examples=150, deadline=None)
def test_report_invariants(seed, strategy):
    t = _random_tree(seed)
    report = rank_tree(t, strategy)
    assert sorted(report.blocking_order) == sorted(t.members)
    keys = [(-s.rank, s.index) for s in report.scores]
    assert keys == sorted(keys)
    for s in report.scores:
        assert 0.0 <= s.height <= 1.0
        assert 0.0 <= s.area <= 1.0
        assert 0.0 <= s.timing <= 1.0
        assert s.rank == s.height + s.area + (1.0 - s.timing)
        assert s.rank <= 3.0
        if t.is_leaf(s.node):
            assert s.rank == 1.0
    if len(t) >= 2:
        root = report.score_of("0")
        assert (root.height, root.area) == (1.0, 1.0)
        assert all(s.height + s.area < 2.0 for s in report.scores if s.node != "0")


@given(
    st.integers(min_value=0, max_value=2**32),
    st.sampled_from(STRATEGIES),
    st.sampled_from([0.125, 0.5, 2.0, 1024.0]),
)
@settings(max_examples=100, deadline=None)
def test_order_invariant_under_cost_scaling(seed, strategy, factor):
    t = _random_tree(seed)
    assert rank_tree(t, strategy).blocking_order == rank_tree(t.scaled(factor), strategy).blocking_order


# -- buckets ---------------------------------------------------------------------


def test_bucket_root_and_leaf():
    t = PropagationTree.from_edges("r", [("r", "a", 1.0)])
    dist = bucket_distribution(rank_tree(t, "average"))
    # root: 1 + 1 + 0.5 = 2.5 -> severe; the leaf is only counted
    assert (dist.mild, dist.severe, dist.at_one, dist.total) == (0.0, 1.0, 1, 2)


def test_bucket_single_node():
    dist = bucket_distribution(rank_tree(SINGLE, "ratio"))
    assert (dist.mild, dist.severe, dist.at_one) == (0.0, 0.0, 1)


def test_bucket_boundaries():
    chain = rank_tree(CHAIN, "ratio")  # ranks 2.0, 1.0, 1.0
    dist = bucket_distribution(chain)
    assert (dist.mild, dist.severe, dist.at_one) == (1.0, 0.0, 2)


@given(st.integers(min_value=0, max_value=2**32), st.sampled_from(STRATEGIES))
@settings(max_examples=100, deadline=None)
def test_bucket_fractions_sum_to_one(seed, strategy):
    rng = random.Random(seed)
    t = PropagationTree.from_edges("0", random_tree_edges(rng, 300))
    dist = bucket_distribution(rank_tree(t, strategy))
    assert dist.mild + dist.severe == pytest.approx(1.0, abs=1e-9)
    assert dist.counted + dist.at_one + dist.below_one == dist.total == 300


def test_bucket_table_modes():
    reports = [rank_tree(_random_tree(s), "median") for s in range(5)]
    pooled = bucket_table(reports, [10, 5, 10], mode="pooled")
    per_tree = bucket_table(reports, [5], mode="per_tree")
    assert [k for k, _ in pooled] == [5, 10]
    assert pooled[0][1].total == 5
    assert per_tree[0][1].total == sum(min(5, len(r)) for r in reports)
    with pytest.raises(ValueError):
        bucket_table(reports, [5], mode="global")
