import numpy as np
import pytest

from netform import netgen
from netform.graph import Graph
from netform.rng import stream


def test_ring_lattice_structure():
    g = netgen.ring_lattice(10, 4)
    assert g.edge_count == 20
    assert set(g.degrees().tolist()) == {4}
    assert g.has_edge(0, 9) and g.has_edge(0, 8) and not g.has_edge(0, 7)
    with pytest.raises(ValueError):
        netgen.ring_lattice(4, 4)


def test_watts_strogatz_beta_zero_is_lattice():
    assert netgen.watts_strogatz(20, 4, 0.0, 1) == netgen.ring_lattice(20, 4)


def test_watts_strogatz_preserves_edge_count():
    g = netgen.watts_strogatz(40, 4, 0.5, 2)
    assert g.edge_count == 80
    g.check_invariants()


def test_sbm_blocks_and_determinism():
    g1, labels = netgen.stochastic_block_model(20, 1.0, 0.0, 0)
    assert labels.tolist() == ["A"] * 10 + ["B"] * 10
    assert g1.edge_count == 2 * 45
    assert all(labels[u] == labels[v] for u, v in g1.edges())
    a, _ = netgen.stochastic_block_model(30, 0.5, 0.1, 7)
    b, _ = netgen.stochastic_block_model(30, 0.5, 0.1, 7)
    assert a == b
    with pytest.raises(ValueError):
        netgen.stochastic_block_model(5, 0.5, 0.1, 0)


def test_sbm_density_close_to_parameters():
    g, labels = netgen.stochastic_block_model(200, 0.3, 0.05, 3)
    same = sum(labels[u] == labels[v] for u, v in g.edges())
    diff = g.edge_count - same
    assert abs(same / (2 * 100 * 99 / 2) - 0.3) < 0.02
    assert abs(diff / (100 * 100) - 0.05) < 0.01


def test_erdos_renyi_extremes():
    assert netgen.erdos_renyi(10, 0.0, 0).edge_count == 0
    assert netgen.erdos_renyi(10, 1.0, 0).edge_count == 45


def test_barabasi_albert_edge_count_and_connectivity():
    g = netgen.barabasi_albert(300, 2, 4)
    assert g.edge_count == 2 + 2 * (300 - 3)
    assert len(g.connected_components()) == 1
    with pytest.raises(ValueError):
        netgen.barabasi_albert(2, 2, 0)


def test_seed_spec_validation():
    with pytest.raises(ValueError):
        netgen.SeedSpec("bogus", 10)
    with pytest.raises(ValueError):
        netgen.SeedSpec("er", 10, {"p": 1.5})
    g, labels = netgen.generate_seed(netgen.SeedSpec("empty", 5))
    assert g == Graph(5) and labels is None


def test_attributes_uniform_and_similarity():
    schema = netgen.AttributeSchema.default()
    attrs = netgen.generate_attributes(3000, schema, stream(1, "attributes"))
    for name, vocab in schema.features:
        counts = np.bincount(attrs.codes[name], minlength=len(vocab)) / 3000
        assert np.allclose(counts, 1 / len(vocab), atol=0.03)
    i, j = 0, 1
    manual = sum(attrs.value(i, n) == attrs.value(j, n) for n in attrs.names)
    assert attrs.similarity(i, j) == manual
    assert attrs.similarity_to(0, [0])[0] == 3


def test_distractor_feature():
    schema = netgen.AttributeSchema.default(distractor=True)
    assert schema.names[-1] == "lucky_number"


def test_attribute_table_roundtrip():
    t = netgen.AttributeTable({"a": ["x", "y", "x"]}, {"a": ["y", "x"]})
    assert t.codes["a"].tolist() == [1, 0, 1]
    assert netgen.AttributeTable(t.to_columns(), t.vocab) == t
    with pytest.raises(ValueError):
        netgen.AttributeTable({"a": ["z"]}, {"a": ["x"]})


def test_attributed_graph_mean_degree_and_homophily():
    g, attrs = netgen.attributed_graph(400, netgen.AttributeSchema.default(), 10.0, 1.0, 5)
    mean_deg = 2 * g.edge_count / g.n
    assert 8.5 < mean_deg < 11.5
    sims = [attrs.similarity(u, v) for u, v in g.edges()]
    # independent uniform 3-valued features agree on 1 feature in expectation
    assert np.mean(sims) > 1.2
