"""Propagation trees, harmfulness ranking and blocking simulation for directed social graphs."""

from .arborescence import PropagationTree, build_mcwdst, iteration_count, oracle_shortest_path_tree
from .errors import (
    DuplicateEdge,
    DuplicateRoot,
    InvalidTree,
    MalformedLine,
    MalformedTriple,
    MissingRoot,
    NegativeLatency,
    NonPositiveCost,
    ParseError,
    SelfLoop,
    SourceBlocked,
    SpreadTreeError,
    UnknownNode,
    UnknownRoot,
    UnknownSource,
)
from .export import export_dot, format_tree, report_to_json
from .graphio import (
    WeightedDigraph,
    format_edge_list,
    load_twitter15_corpus,
    parse_edge_list,
    parse_twitter15_trace,
)
from .ranking import (
    BucketDistribution,
    HarmReport,
    NodeScore,
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
from .simulate import (
    DiffusionOutcome,
    OutDegreeK,
    RandomK,
    RankedTopK,
    compare_policies,
    evaluate_policy,
    simulate_diffusion,
)

__version__ = "0.1.0"
