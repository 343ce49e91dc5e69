import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import corpus, random_corpus
from subtree_stats.counting import (
    BudgetExceeded,
    CapExceeded,
    Census,
    DisconnectedGraphError,
    ExactProbability,
    ExactRatio,
    brute_force_census,
    certified_probability_interval,
    closed_form_census,
    log_spanning_tree_count,
    mean_subtree_edges,
    pair_count,
    pair_count_oracle,
    prefix_bound_holds,
    sandwich_report,
    spanning_probability,
    spanning_tree_count,
    spanning_trees,
    subtree_census,
    top_census,
)
from subtree_stats.graph import (
    Graph,
    Multigraph,
    build_graph,
    complete,
    complete_bipartite,
    cycle,
    degree_stats,
    is_connected,
    path,
    star,
)
from subtree_stats.random_models import GnpParams, sample_gnp


def graphs(max_n=7):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.booleans(), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2).map(
            lambda flags: build_graph(n, [e for e, f in zip(((u, v) for u in range(n) for v in range(u + 1, n)), flags) if f])
        )
    )


# spanning trees -----------------------------------------------------------------


def test_spanning_tree_examples():
    assert spanning_tree_count(complete(4)) == 16
    assert spanning_tree_count(cycle(5)) == 5
    assert spanning_tree_count(Multigraph(2, ((0, 3), (3, 0)))) == 3
    assert spanning_tree_count(Graph(0, (), 0)) == 0
    assert spanning_tree_count(complete(1)) == 1
    assert spanning_tree_count(build_graph(3, [(0, 1)])) == 0


def test_cayley_and_bipartite_counts():
    for n in range(2, 12):
        assert spanning_tree_count(complete(n)) == n ** (n - 2)
    assert spanning_tree_count(complete_bipartite(3, 4)) == 3**3 * 4**2


def test_log_spanning_examples():
    assert log_spanning_tree_count(complete(4)) == pytest.approx(math.log(16), rel=1e-12)
    assert log_spanning_tree_count(path(10)) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DisconnectedGraphError):
        log_spanning_tree_count(build_graph(3, [(0, 1)]))


def test_log_spanning_relative_accuracy():
    for _, g in random_corpus(20, max_n=30, min_n=10, p=0.4, seed=5):
        exact = spanning_tree_count(g)
        assert abs(log_spanning_tree_count(g) - math.log(exact)) <= 1e-9 * max(1.0, math.log(exact))


@settings(max_examples=40, deadline=None)
@given(graphs(), st.randoms(use_true_random=False))
def test_spanning_count_monotone_under_edge_addition(g, rnd):
    missing = [(u, v) for u in range(g.n) for v in range(u + 1, g.n) if not g.has_edge(u, v)]
    if not missing:
        return
    h = build_graph(g.n, g.edges() + [rnd.choice(missing)])
    assert spanning_tree_count(h) >= spanning_tree_count(g)


# census -------------------------------------------------------------------------


@pytest.mark.parametrize(
    "g,counts",
    [
        (complete(3), (3, 3, 3)),
        (path(4), (4, 3, 2, 1)),
        (complete(4), (4, 6, 12, 16)),
        (star(4), (4, 3, 3, 1)),
        (complete_bipartite(2, 2), (4, 4, 4, 4)),
    ],
)
def test_census_examples(g, counts):
    assert subtree_census(g).counts == counts
    assert brute_force_census(g).counts == counts


def test_census_cap():
    with pytest.raises(CapExceeded, match="--max-exact-n"):
        subtree_census(path(25))
    assert subtree_census(path(25), max_exact_n=25).counts[-1] == 1
    with pytest.raises(CapExceeded):
        brute_force_census(path(11))


def test_census_invariants_on_corpus():
    for name, g in corpus():
        c = subtree_census(g)
        assert c.s(1) == g.n and (g.n < 2 or c.s(2) == g.edge_count), name
        assert c.spanning == spanning_tree_count(g), name
        assert (c.spanning > 0) == is_connected(g), name
        assert prefix_bound_holds(c), name


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_census_matches_brute_force(g):
    assert subtree_census(g) == brute_force_census(g)


@settings(max_examples=30, deadline=None)
@given(graphs(8), st.randoms(use_true_random=False))
def test_census_relabel_invariant(g, rnd):
    perm = list(range(g.n))
    rnd.shuffle(perm)
    assert subtree_census(g.relabel(perm)) == subtree_census(g)


def test_disconnected_census():
    g = build_graph(5, [(0, 1), (1, 2), (3, 4)])
    c = subtree_census(g)
    assert c.counts == (5, 3, 1, 0, 0)
    assert spanning_probability(c) == ExactProbability(0, 1)


def test_closed_forms_match_census():
    for n in range(1, 13):
        assert closed_form_census("complete", n) == subtree_census(complete(n))
    for m, n in [(1, 1), (2, 2), (2, 3), (3, 4), (4, 4), (5, 6)]:
        assert closed_form_census("complete_bipartite", m, n) == subtree_census(complete_bipartite(m, n))
    with pytest.raises(ValueError):
        closed_form_census("cycle", 5)


def test_census_json_round_trip():
    c = closed_form_census("complete", 30)
    assert Census.from_json(c.to_json()) == c
    assert '"counts": ["30"' in c.to_json()


# probabilities and means ---------------------------------------------------------


def test_probability_examples():
    assert spanning_probability(complete(3)) == ExactProbability(1, 3)
    assert spanning_probability(path(4)) == ExactProbability(1, 10)
    assert spanning_probability(complete(4)) == ExactProbability(8, 19)
    assert spanning_probability(complete_bipartite(1, 1)).fraction == Fraction(1, 3)
    assert spanning_probability(complete_bipartite(2, 2)).fraction == Fraction(1, 4)


def test_mean_edges_examples():
    assert mean_subtree_edges(path(2)).fraction == Fraction(1, 3)
    assert mean_subtree_edges(complete(3)).fraction == 1
    assert mean_subtree_edges(complete(1)).fraction == 0


def test_ratio_validation():
    with pytest.raises(ValueError):
        ExactRatio(2, 4)
    with pytest.raises(ValueError):
        ExactProbability(3, 2)
    with pytest.raises(ValueError):
        ExactRatio(1, 0)


# top census ----------------------------------------------------------------------


def test_top_census_examples():
    assert top_census(complete(4), 1).values == (16, 12)
    assert top_census(path(4), 1).values == (1, 2)
    assert top_census(cycle(6), 0).values == (6,)


def test_top_census_matches_census():
    rnd = random.Random(11)
    for _, g in random_corpus(15, max_n=12, min_n=5, p=0.6, seed=2):
        c = subtree_census(g)
        depth = rnd.randint(0, g.n - 1)
        top = top_census(g, depth, mode="exact")
        assert top.exact
        assert top.values == tuple(c.s(g.n - k) for k in range(depth + 1))


def test_top_census_log_mode():
    g = sample_gnp(GnpParams(14, 0.7), 4)
    assert is_connected(g)
    exact = top_census(g, 3, mode="exact")
    approx = top_census(g, 3, mode="log")
    assert not approx.exact
    for k in range(4):
        assert approx.ratio(k) == pytest.approx(float(exact.ratio(k)), rel=1e-10)


def test_top_census_budget_and_mode_errors():
    with pytest.raises(BudgetExceeded):
        top_census(complete(40), 6, budget=10**5)
    with pytest.raises(ValueError):
        top_census(complete(5), 5)
    with pytest.raises(ValueError):
        top_census(complete(5), 1, mode="fast")


# pair counts ---------------------------------------------------------------------


def test_pair_examples():
    assert pair_count(complete(3), 1).value == 6
    assert pair_count(complete(4), 1).value == 36
    assert pair_count_oracle(complete(3), 1).value == 6
    assert pair_count_oracle(complete(4), 2).value == 48
    assert pair_count_oracle(cycle(4), 1).value == 8
    g = complete_bipartite(2, 3)
    assert pair_count(g, 0).value == spanning_tree_count(g) == pair_count_oracle(g, 0).value


def test_pair_count_range():
    with pytest.raises(ValueError):
        pair_count(complete(4), 4)
    with pytest.raises(ValueError):
        pair_count_oracle(complete(4), -1)


def test_spanning_tree_enumeration():
    assert len(spanning_trees(complete(5))) == 125
    assert len(spanning_trees(build_graph(4, [(0, 1), (2, 3)]))) == 0


@settings(max_examples=25, deadline=None)
@given(graphs(6))
def test_pairs_match_oracle(g):
    for k in range(g.n):
        assert pair_count(g, k) == pair_count_oracle(g, k)


def test_sandwich_examples():
    # delta - k = 1 for K_3 at k = 1, so the lower bound is 1 * s_2 = 3
    assert sandwich_report(complete(3), 1) == (3, 6, 9, True)
    assert sandwich_report(complete(4), 1) == (24, 36, 64, True)
    g = cycle(5)
    sn = spanning_tree_count(g)
    assert sandwich_report(g, 0) == (sn, sn, sn, True)
    with pytest.raises(ValueError):
        sandwich_report(path(4), 2)


# certified intervals ------------------------------------------------------------


def test_interval_contains_k4_style():
    g = complete(9)
    exact = spanning_probability(g).fraction
    for depth in range(1, 4):
        iv = certified_probability_interval(g, depth, census=subtree_census(g))
        assert iv.certified and iv.contains(exact)


def test_interval_precondition():
    with pytest.raises(ValueError):
        certified_probability_interval(path(5), 1)
    with pytest.raises(DisconnectedGraphError):
        certified_probability_interval(build_graph(6, [(0, 1)]), 1)
    with pytest.raises(ValueError):
        certified_probability_interval(complete(8), 4)


def test_interval_on_dense_random_graphs():
    for _, g in random_corpus(12, max_n=18, min_n=10, p=0.75, seed=9):
        delta = degree_stats(g)[0]
        exact = spanning_probability(g).fraction
        for depth in range(1, (delta + 1) // 2):
            iv = certified_probability_interval(g, depth)
            assert iv.mode == "exact" and iv.contains(exact)


def test_interval_k50():
    census = closed_form_census("complete", 50)
    exact = spanning_probability(census).fraction
    g = complete(50)
    iv10 = certified_probability_interval(g, 10, census=census)
    iv12 = certified_probability_interval(g, 12, census=census)
    assert iv10.contains(exact) and iv12.contains(exact)
    assert iv10.relative_width < 1e-6
    assert iv12.relative_width < iv10.relative_width


def test_interval_numerical_mode_flagged():
    g = sample_gnp(GnpParams(40, 0.8), 1)
    iv = certified_probability_interval(g, 3, mode="log")
    assert not iv.certified and iv.mode == "numerical"
    exact_iv = certified_probability_interval(g, 3, mode="exact")
    assert exact_iv.certified
    assert iv.lower <= exact_iv.upper and exact_iv.lower <= iv.upper
