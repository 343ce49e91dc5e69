import math
import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import forest_corpus
from subtree_stats.counting import brute_force_census
from subtree_stats.graph import build_graph
from subtree_stats.trees import (
    LabelledTree,
    RootedForest,
    TreeError,
    forest_linear_extensions,
    leaf_count,
    leaf_deficient_tree_bound,
    leaf_sandwich_check,
    linear_extensions_oracle,
    prufer_decode,
    prufer_encode,
    surjection_count,
    tree_subtree_polynomial,
    trees_with_leaf_count,
)


def path_tree(n):
    return LabelledTree.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star_tree(n):
    return LabelledTree.from_edges(n, [(0, i) for i in range(1, n)])


def prufer_seqs(max_n=10):
    return st.integers(2, max_n).flatmap(
        lambda n: st.tuples(st.just(n), st.lists(st.integers(0, n - 1), min_size=n - 2, max_size=n - 2))
    )


def test_tree_validation():
    with pytest.raises(TreeError):
        LabelledTree.from_edges(3, [(0, 1)])
    with pytest.raises(TreeError):
        LabelledTree.from_edges(4, [(0, 1), (1, 0), (2, 3)])
    with pytest.raises(TreeError):
        LabelledTree.from_edges(3, [(0, 1), (1, 5)])
    with pytest.raises(TreeError):
        LabelledTree.from_parents([-1, 0, -1])


def test_tree_json_round_trip():
    t = prufer_decode([3, 3, 1, 0], 6)
    assert LabelledTree.from_json(t.to_json()) == t


def test_subtree_polynomial_examples():
    assert tree_subtree_polynomial(path_tree(4)).counts == (4, 3, 2, 1)
    assert tree_subtree_polynomial(star_tree(4)).counts == (4, 3, 3, 1)
    assert tree_subtree_polynomial(path_tree(2)).counts == (2, 1)
    assert tree_subtree_polynomial(LabelledTree.from_edges(1, [])).counts == (1,)


def test_subtree_polynomial_matches_brute_force():
    rnd = random.Random(7)
    for _ in range(500):
        n = rnd.randint(2, 10)
        t = prufer_decode([rnd.randrange(n) for _ in range(n - 2)], n)
        assert tree_subtree_polynomial(t) == brute_force_census(build_graph(n, t.edges))


def test_leaf_count_examples():
    assert leaf_count(path_tree(5)) == 2
    assert leaf_count(star_tree(6)) == 5
    with pytest.warns(UserWarning):
        assert leaf_count(LabelledTree.from_edges(1, [])) == 0


def test_leaf_sandwich_examples():
    assert leaf_sandwich_check(path_tree(4), 1) == (2, 2, 2, True)
    assert leaf_sandwich_check(star_tree(4), 2) == (3, 3, 6, True)
    assert leaf_sandwich_check(prufer_decode([2, 2, 4], 5), 0) == (1, 1, 1, True)
    with pytest.raises(ValueError):
        leaf_sandwich_check(path_tree(4), 4)


def test_prufer_examples():
    assert prufer_decode([], 2).edges == ((0, 1),)
    assert prufer_decode([0, 0], 4) == star_tree(4)
    with pytest.raises(TreeError):
        prufer_decode([0], 4)
    with pytest.raises(TreeError):
        prufer_decode([5, 0], 4)
    with pytest.raises(TreeError):
        prufer_encode(LabelledTree.from_edges(1, []))


def test_prufer_round_trip_random():
    rnd = random.Random(1)
    for _ in range(100):
        seq = [rnd.randrange(8) for _ in range(6)]
        assert prufer_encode(prufer_decode(seq, 8)) == seq


@given(prufer_seqs())
def test_prufer_bijection(data):
    n, seq = data
    t = prufer_decode(seq, n)
    assert prufer_encode(t) == seq
    assert prufer_decode(prufer_encode(t), n) == t
    assert leaf_count(t) == n - len(set(seq))


def test_surjections():
    assert surjection_count(3, 2) == 6
    assert surjection_count(2, 2) == 2
    assert surjection_count(4, 1) == 1
    assert surjection_count(2, 3) == 0
    assert surjection_count(0, 0) == 1


def test_trees_with_leaf_count_examples():
    assert trees_with_leaf_count(4, 2) == 12
    assert trees_with_leaf_count(4, 3) == 4
    assert trees_with_leaf_count(4, 4) == 0
    assert trees_with_leaf_count(2, 2) == 1


def test_leaf_formula_sums_to_cayley():
    for n in range(2, 13):
        assert sum(trees_with_leaf_count(n, ell) for ell in range(n + 1)) == n ** (n - 2)


def test_leaf_formula_matches_prufer_tally():
    for n in range(2, 9):
        tally = [0] * (n + 1)
        for seq in product(range(n), repeat=n - 2):
            tally[n - len(set(seq))] += 1
        assert tally == [trees_with_leaf_count(n, ell) for ell in range(n + 1)]


def test_leaf_deficient_bound():
    assert leaf_deficient_tree_bound(4, 0.6) == 12
    assert leaf_deficient_tree_bound(6, 1.5) == 6**4
    assert leaf_deficient_tree_bound(5, 0.4) == 0
    # strict inequality: 0.5 * 4 = 2 leaves is not counted
    assert leaf_deficient_tree_bound(4, 0.5) == 0


def test_linear_extension_examples():
    assert forest_linear_extensions(RootedForest((None, 0, 1))) == 1
    assert forest_linear_extensions(RootedForest((None, 0, 0, 0))) == 6
    assert forest_linear_extensions(RootedForest((None, None))) == 2
    assert linear_extensions_oracle(RootedForest((None, 0, 1))) == 1
    assert linear_extensions_oracle(RootedForest((None, 0, 0, 0))) == 6
    assert linear_extensions_oracle(RootedForest(())) == 1
    with pytest.raises(TreeError):
        RootedForest((1, 0))


def test_linear_extensions_match_oracle_small():
    for f in forest_corpus(6):
        assert forest_linear_extensions(f) == linear_extensions_oracle(f)


@settings(max_examples=50)
@given(st.integers(1, 30).flatmap(lambda n: st.tuples(*[st.integers(-1, v - 1) for v in range(n)])))
def test_linear_extensions_integral(parent):
    f = RootedForest(parent)
    got = forest_linear_extensions(f)
    assert got >= 1
    assert math.factorial(f.size) % got == 0
