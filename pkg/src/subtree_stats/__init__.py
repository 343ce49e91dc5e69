"""Exact subtree statistics of graphs and seeded random-graph experiments."""

from .asymptotics import (
    chernoff_bounds,
    dense_limit,
    eq1_bound,
    janson_statistic,
    poisson_ratio_target,
    sparse_envelope,
    tail_bound,
)
from .counting import (
    Census,
    CertifiedInterval,
    ExactProbability,
    ExactRatio,
    PairCount,
    TopCensus,
    brute_force_census,
    certified_probability_interval,
    closed_form_census,
    log_spanning_tree_count,
    mean_subtree_edges,
    pair_count,
    pair_count_oracle,
    sandwich_report,
    spanning_probability,
    spanning_tree_count,
    subtree_census,
    top_census,
)
from .graph import Graph, Multigraph, build_graph, named_graph, parse_edge_list, read_edge_list
from .random_models import (
    GnpParams,
    Seed,
    sample_gnp,
    sample_uniform_labelled_tree,
    sample_uniform_spanning_tree,
    trial_seed,
)
from .trees import LabelledTree, RootedForest, prufer_decode, prufer_encode, tree_subtree_polynomial

__version__ = "0.1.0"
