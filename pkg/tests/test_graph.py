import numpy as np
import pytest

from netform.graph import Graph, GraphError, complete_graph, edge_diff, path_graph


def test_add_edge_is_idempotent_and_symmetric():
    g = Graph(3)
    assert g.add_edge(0, 1)
    assert not g.add_edge(1, 0)
    assert g.edge_count == 1
    assert g.has_edge(1, 0)
    g.check_invariants()


@pytest.mark.parametrize("u,v", [(0, 0), (0, 3), (-1, 0)])
def test_invalid_edges_rejected(u, v):
    with pytest.raises(GraphError):
        Graph(3).add_edge(u, v)


def test_non_integer_node_rejected():
    with pytest.raises(GraphError):
        Graph(3).add_edge(0, "1")
    with pytest.raises(GraphError):
        Graph(3).add_edge(True, 1)


def test_frozen_graph_rejects_mutation():
    g = Graph(3, [(0, 1)]).freeze()
    with pytest.raises(GraphError):
        g.add_edge(1, 2)
    assert g.freeze() is g


def test_copy_is_independent():
    g = Graph(3, [(0, 1)])
    h = g.copy()
    h.add_edge(1, 2)
    assert g.edge_count == 1 and h.edge_count == 2


def test_neighbors_sorted_and_common():
    g = Graph(5, [(0, 4), (0, 2), (1, 2), (1, 4), (3, 4)])
    assert g.neighbors(0) == [2, 4]
    assert g.common_neighbors(0, 1) == [2, 4]
    assert g.non_neighbors(0) == [1, 3]
    with pytest.raises(GraphError):
        g.common_neighbors(1, 1)


def test_csr_matches_adjacency():
    g = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    indptr, indices = g.csr()
    assert indptr.tolist() == [0, 2, 4, 6, 8]
    assert indices.tolist() == [1, 3, 0, 2, 1, 3, 0, 2]
    a = g.adjacency_matrix()
    assert np.array_equal(a, a.T) and a.sum() == 8


def test_components_sorted_largest_first():
    g = Graph(6, [(4, 5), (0, 1), (1, 2)])
    assert g.connected_components() == [[0, 1, 2], [4, 5], [3]]


def test_distances_path():
    d = path_graph(4).distances()
    assert d[0].tolist() == [0, 1, 2, 3]
    d2 = Graph(3, [(0, 1)]).distances([0])
    assert d2.tolist() == [[0, 1, -1]]


def test_triangles_and_clustering_complete_graph():
    g = complete_graph(5)
    assert g.triangles().tolist() == [6] * 5
    assert np.allclose(g.local_clustering(), 1.0)


def test_singular_values_of_cycle():
    g = Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert np.allclose(g.singular_values(), [2, 2, 0, 0], atol=1e-12)


def test_edge_diff():
    g1 = Graph(4, [(0, 1)])
    gT = Graph(4, [(0, 1), (2, 3), (1, 2)])
    diff = edge_diff(g1, gT)
    assert diff.sorted_edges() == [(1, 2), (2, 3)]
    assert diff.base_edge_count == 1 and diff.final_edge_count == 3
    with pytest.raises(GraphError):
        edge_diff(Graph(3), Graph(4))


def test_equality_ignores_insertion_order():
    assert Graph(3, [(0, 1), (1, 2)]) == Graph(3, [(2, 1), (1, 0)])
    assert Graph(3) != Graph(4)
