import logging
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subtree_stats.graph import (
    Graph,
    GraphError,
    Multigraph,
    bits,
    build_graph,
    complete,
    complete_bipartite,
    component_of,
    connected_sets,
    contract_connected_set,
    cycle,
    degree_stats,
    format_edge_list,
    induced_subgraph,
    is_connected,
    is_connected_set,
    named_graph,
    parse_edge_list,
    path,
    read_edge_list,
    star,
    to_mask,
    write_edge_list,
)


def edge_lists(max_n=8):
    return st.integers(1, max_n).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1]),
                     max_size=20),
        )
    )


def test_build_triangle():
    g = build_graph(3, [(0, 1), (1, 2), (0, 2)])
    assert g.edge_count == 3
    assert g == complete(3)


def test_build_isolated():
    g = build_graph(2, [])
    assert g.edge_count == 0
    assert degree_stats(g) == (0, 0, False)


def test_duplicates_collapse():
    g = build_graph(4, [(0, 1), (0, 1), (1, 2), (2, 3)])
    assert g.edge_count == 3
    assert g == path(4)


@pytest.mark.parametrize("edges", [[(0, 3)], [(-1, 0)], [(1, 1)]])
def test_build_rejects(edges):
    with pytest.raises(GraphError):
        build_graph(3, edges)


def test_order_cap():
    with pytest.raises(GraphError):
        build_graph(513, [])


@given(edge_lists())
def test_symmetry_and_edge_count(data):
    n, edges = data
    g = build_graph(n, edges)
    for u in range(n):
        for v in bits(g.adj[u]):
            assert g.adj[v] >> u & 1
        assert not g.adj[u] >> u & 1
    assert 2 * g.edge_count == sum(g.degrees())
    assert g.edge_count == len({(min(e), max(e)) for e in edges})


def test_named_families():
    assert complete(4).edge_count == 6
    g = named_graph("clique_path_clique", 3, 2)
    assert g.n == 8 and g.edge_count == 9
    assert complete_bipartite(2, 2) == cycle(4).relabel([0, 2, 1, 3])
    assert degree_stats(star(5)) == (1, 4, True)
    with pytest.raises(GraphError):
        named_graph("complete", 0)
    with pytest.raises(GraphError):
        named_graph("wheel", 5)


def test_clique_path_clique_labelling():
    g = named_graph("clique_path_clique", 3, 2)
    # chain 0 - 6 - 7 - 3
    assert g.has_edge(0, 6) and g.has_edge(6, 7) and g.has_edge(7, 3)
    assert not g.has_edge(0, 3)


def test_clique_pendant_path_labelling():
    g = named_graph("clique_pendant_path", 4, 3)
    assert g.n == 7 and g.edge_count == 6 + 3
    assert g.has_edge(0, 4) and g.has_edge(4, 5) and g.has_edge(5, 6)


def test_complete_degree_stats():
    for n in range(2, 10):
        assert degree_stats(complete(n)) == (n - 1, n - 1, True)
    assert degree_stats(complete(1)) == (0, 0, True)


def test_induced_subgraph_examples():
    h, labels = induced_subgraph(complete(4), {0, 1, 2})
    assert h == complete(3) and labels == [0, 1, 2]
    h, _ = induced_subgraph(path(4), {0, 3})
    assert h.n == 2 and h.edge_count == 0
    h, _ = induced_subgraph(complete_bipartite(2, 2), {0, 1, 2})
    assert h.edge_count == 2 and degree_stats(h) == (1, 2, True)
    with pytest.raises(GraphError):
        induced_subgraph(path(3), {5})


def test_induced_whole_graph_is_identity():
    g = complete_bipartite(2, 3)
    h, labels = induced_subgraph(g, range(g.n))
    assert h == g and labels == list(range(g.n))


def test_contraction_examples():
    m = contract_connected_set(complete(3), {0, 1})
    assert m.n == 2 and m.multiplicity[0][1] == 2
    m = contract_connected_set(complete(4), {0, 1, 2})
    assert m.n == 2 and m.multiplicity[0][1] == 3
    m = contract_connected_set(cycle(5), range(5))
    assert m.n == 1
    with pytest.raises(GraphError):
        contract_connected_set(path(4), {0, 3})
    with pytest.raises(GraphError):
        contract_connected_set(path(4), set())


@given(edge_lists(), st.randoms(use_true_random=False))
def test_contraction_preserves_cross_edges(data, rnd):
    n, edges = data
    g = build_graph(n, edges)
    start = rnd.randrange(n)
    comp = component_of(g, start)
    verts = list(bits(comp))
    s = {start}
    # grow a random connected set inside the component
    for v in rnd.sample(verts, len(verts)):
        if any(g.has_edge(v, u) for u in s):
            s.add(v)
    mask = to_mask(s)
    m = contract_connected_set(g, s)
    cross = sum(1 for u, v in g.edges() if (mask >> u & 1) != (mask >> v & 1))
    assert sum(m.multiplicity[0]) == cross
    assert m.n == n - len(s) + 1


def test_multigraph_validation():
    with pytest.raises(GraphError):
        Multigraph(2, ((0, 1), (2, 0)))
    with pytest.raises(GraphError):
        Multigraph(2, ((1, 1), (1, 0)))
    assert Multigraph.from_graph(path(3)).laplacian() == [[1, -1, 0], [-1, 2, -1], [0, -1, 1]]


def test_connected_sets_exact_once():
    rnd = random.Random(3)
    for _ in range(30):
        n = rnd.randint(1, 8)
        g = build_graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rnd.random() < 0.4])
        got = list(connected_sets(g))
        assert len(got) == len(set(got))
        want = {m for m in range(1, 1 << n) if is_connected_set(g, m)}
        assert set(got) == want


def test_is_connected_edge_cases():
    assert is_connected(Graph(1, (0,), 0))
    assert not is_connected(build_graph(2, []))


def test_edge_list_round_trip(tmp_path):
    g = complete_bipartite(2, 3)
    f = tmp_path / "g.txt"
    write_edge_list(g, f)
    assert read_edge_list(f) == g
    assert parse_edge_list(format_edge_list(g)) == g


def test_edge_list_comments_and_duplicates(caplog):
    text = "# a path\n4 4\n\n0 1\n1 2  # middle\n2 3\n1 0\n"
    with caplog.at_level(logging.INFO):
        g = parse_edge_list(text)
    assert g == path(4)
    assert "duplicate" in caplog.text


@pytest.mark.parametrize("text", ["", "3\n", "3 1\n0\n", "3 2\n0 1\n", "2 1\n0 5\n", "x y\n"])
def test_edge_list_malformed(text):
    with pytest.raises(GraphError):
        parse_edge_list(text)


@settings(max_examples=30)
@given(edge_lists(), st.randoms(use_true_random=False))
def test_relabel_preserves_degrees(data, rnd):
    n, edges = data
    g = build_graph(n, edges)
    perm = list(range(n))
    rnd.shuffle(perm)
    h = g.relabel(perm)
    assert sorted(g.degrees()) == sorted(h.degrees())
    assert all(h.has_edge(perm[u], perm[v]) for u, v in g.edges())
