import numpy as np
import pytest

from netform.graph import Graph


@pytest.fixture
def k4_minus_edge():
    return Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def to_nx(g):
    import networkx as nx

    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h
