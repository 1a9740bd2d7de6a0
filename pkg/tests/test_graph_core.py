from __future__ import annotations

import numpy as np
import pytest

from bdmgraph.errors import DataError
from bdmgraph.graph_core import (
    CompositeGraph,
    EdgeNotFoundError,
    GeneratorSpec,
    Graph,
    GraphFormatError,
    InvalidSpecError,
    adjacency_matrix,
    connect,
    connected_components,
    generate,
    read_graph,
    remove_edge,
    write_graph,
)


def gen(family, k, seed=42, **params):
    return generate(GeneratorSpec(family, k, params, seed))


def test_graph_normalizes_edges():
    g = Graph.from_edges(3, [(1, 0), (2, 1)])
    assert g.edges == {(0, 1), (1, 2)}
    with pytest.raises(DataError):
        Graph.from_edges(3, [(1, 1)])
    with pytest.raises(DataError):
        Graph.from_edges(3, [(0, 3)])


def test_adjacency_symmetric_and_readonly():
    g = gen("cycle", 5)
    adj = g.adjacency
    assert np.array_equal(adj, adj.T) and not adj.diagonal().any()
    assert {(int(u), int(v)) for u, v in zip(*np.nonzero(np.triu(adj)))} == set(g.edges)
    with pytest.raises(ValueError):
        adj[0, 1] = 0


def test_complete_cycle_star():
    k4 = gen("complete", 4)
    assert len(k4.edges) == 6 and set(k4.degrees) == {3}
    c5 = gen("cycle", 5)
    assert len(c5.edges) == 5 and set(c5.degrees) == {2}
    assert (0, 4) in c5.edges
    s5 = gen("star", 5)
    assert len(s5.edges) == 4
    assert sorted(s5.degrees) == [1, 1, 1, 1, 4]
    assert s5.degrees[0] == 1 and s5.degrees[4] == 4


def test_ladder_is_grid():
    lad = gen("ladder", 6)
    assert lad.edges == {(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)}


@pytest.mark.parametrize("k", [4, 6, 8, 10])
def test_closed_form_edge_counts(k):
    assert len(gen("complete", k).edges) == k * (k - 1) // 2
    assert len(gen("cycle", k).edges) == k
    assert len(gen("star", k).edges) == k - 1
    assert len(gen("ladder", k).edges) == 3 * k // 2 - 2


@pytest.mark.parametrize(
    "family,k,params",
    [("cycle", 2, {}), ("ladder", 5, {}), ("star", 1, {}), ("watts_strogatz", 5, {"k_deg": 6, "p": 0.5}),
     ("watts_strogatz", 6, {"k_deg": 3, "p": 0.5}), ("erdos_renyi", 5, {"p": 1.5}), ("barabasi_albert", 3, {"m": 3}),
     ("erdos_renyi", 5, {})],
)
def test_invalid_specs(family, k, params):
    with pytest.raises(InvalidSpecError):
        generate(GeneratorSpec(family, k, params))


def test_unknown_family():
    with pytest.raises(InvalidSpecError):
        GeneratorSpec("petersen", 10)


def test_random_families_deterministic():
    for family, params in [("erdos_renyi", {"p": 0.5}), ("barabasi_albert", {"m": 2}),
                           ("watts_strogatz", {"k_deg": 4, "p": 0.5})]:
        a = generate(GeneratorSpec(family, 9, params, 7))
        b = generate(GeneratorSpec(family, 9, params, 7))
        assert a.to_text() == b.to_text()


def test_seed_changes_random_graph():
    texts = {gen("erdos_renyi", 8, seed=s, p=0.5).to_text() for s in range(5)}
    assert len(texts) > 1


def test_barabasi_albert_shape():
    for k in (6, 7, 9):
        g = gen("barabasi_albert", k, m=2)
        # star seed on m+1 vertices, then m edges per new vertex
        assert len(g.edges) == 2 + 2 * (k - 3)
        assert min(g.degrees) >= 1


def test_watts_strogatz_keeps_edge_count():
    for seed in range(10):
        g = gen("watts_strogatz", 7, seed=seed, k_deg=4, p=0.5)
        assert len(g.edges) == 14


def test_watts_strogatz_p0_is_ring_lattice():
    g = gen("watts_strogatz", 7, k_deg=4, p=0.0)
    assert g.edges == {tuple(sorted((u, (u + j) % 7))) for u in range(7) for j in (1, 2)}


@pytest.mark.parametrize("pair,n,m", [(("complete", 4, "cycle", 5), 9, 12), (("complete", 5, "cycle", 4), 9, 15),
                                      (("complete", 5, "star", 5), 10, 15)])
def test_connect_counts(pair, n, m):
    a, ka, b, kb = pair
    c = connect(gen(a, ka), gen(b, kb))
    assert c.graph.n == n and len(c.graph.edges) == m
    assert c.connecting_edge == (0, ka)


def test_connect_to_star_leaf():
    c = connect(gen("complete", 5), gen("star", 5))
    assert c.graph.degrees[c.connecting_edge[1]] == 2  # leaf plus the link


def test_composite_invariants():
    c = connect(gen("complete", 4), gen("cycle", 5), 3, 2)
    assert c.part_of == (1,) * 4 + (2,) * 5
    assert c.part_of_edge(c.connecting_edge) == 0
    assert c.part_of_edge((5, 6)) == 2
    parts = connected_components(remove_edge(c.graph, c.connecting_edge))
    assert parts == [[0, 1, 2, 3], [4, 5, 6, 7, 8]]
    with pytest.raises(DataError):
        CompositeGraph(c.graph, c.part_of, (0, 1))


def test_adjacency_matrix_perm():
    tri = gen("complete", 3)
    assert np.array_equal(adjacency_matrix(tri), np.ones((3, 3)) - np.eye(3))
    one = Graph.from_edges(3, [(0, 1)])
    m = adjacency_matrix(one, (2, 1, 0))
    assert m[2, 1] == m[1, 2] == 1 and m.sum() == 2
    g = gen("ladder", 8)
    assert np.array_equal(adjacency_matrix(g), g.adjacency)


def test_remove_edge():
    tri = gen("complete", 3)
    path = remove_edge(tri, (1, 0))
    assert path.edges == {(0, 2), (1, 2)}
    assert len(tri.edges) == 3
    assert len(remove_edge(gen("complete", 4), (2, 3)).edges) == 5
    with pytest.raises(EdgeNotFoundError):
        remove_edge(gen("cycle", 5), (0, 3))


def test_components_of_isolated_vertices():
    assert connected_components(Graph.from_edges(4, [(1, 2)])) == [[0], [1, 2], [3]]


def test_graph_file_round_trip(tmp_path):
    c = connect(gen("complete", 5), gen("star", 5), 4, 0, name="k5s5")
    path = tmp_path / "k5s5.txt"
    write_graph(path, c)
    text = path.read_text()
    assert text.startswith("n 10\n") and text.endswith("connecting 4 5\npart2_offset 5\n")
    back = read_graph(path)
    assert isinstance(back, CompositeGraph) and back == c
    plain = tmp_path / "plain.txt"
    write_graph(plain, c.graph)
    assert read_graph(plain) == c.graph
    assert b"\r" not in plain.read_bytes()


@pytest.mark.parametrize("text", ["0 1\n", "n 3\n0 x\n", "n 3\n0 1\nconnecting 0 2\n", "n 3\n0 1 2\n"])
def test_graph_file_errors(tmp_path, text):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    with pytest.raises(GraphFormatError):
        read_graph(path)


def test_relabel_and_digest():
    g = gen("cycle", 5)
    h = g.relabel((1, 2, 3, 4, 0))
    assert h.edges == g.edges
    assert h.digest == g.digest
    assert gen("cycle", 6).digest != g.digest
