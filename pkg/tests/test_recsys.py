import math

import networkx as nx
import numpy as np
import pytest
from sklearn.linear_model import LogisticRegression
from sklearn.metrics import roc_auc_score

from conftest import to_nx
from netform import netgen
from netform.choice import recsys
from netform.graph import Graph


def test_adamic_adar_hand_value():
    # 0 and 1 share node 2, which has degree 3
    g = Graph(4, [(0, 2), (1, 2), (2, 3)])
    f = recsys.pair_features(g, None, 0, 1)
    assert f[3] == pytest.approx(1 / math.log(3), abs=1e-12)
    assert f[3] == pytest.approx(0.91024, abs=1e-5)
    assert f[1] == 1 and f[2] == 1 and f[4] == 1.0


@pytest.mark.parametrize("seed", range(3))
def test_pair_features_match_networkx(seed):
    g = netgen.erdos_renyi(40, 0.15, seed)
    h = to_nx(g)
    pairs = [(u, v) for u in range(0, 40, 7) for v in range(1, 40, 5) if u != v]
    aa = {(u, v): s for u, v, s in nx.adamic_adar_index(h, pairs)}
    jac = {(u, v): s for u, v, s in nx.jaccard_coefficient(h, pairs)}
    pa = {(u, v): s for u, v, s in nx.preferential_attachment(h, pairs)}
    for u, v in pairs:
        f = recsys.pair_features(g, None, u, v)
        assert f[2] == pa[(u, v)]
        assert f[3] == pytest.approx(aa[(u, v)], abs=1e-12)
        assert f[4] == pytest.approx(jac[(u, v)], abs=1e-12)


def test_auc_matches_sklearn():
    r = np.random.default_rng(0)
    s = r.integers(0, 5, 60).astype(float)
    y = r.integers(0, 2, 60)
    assert recsys.roc_auc(s, y) == pytest.approx(roc_auc_score(y, s), abs=1e-12)


def test_auc_one_on_separable_toy_set():
    Z = np.array([[0.0, 1.0], [0.2, 0.5], [0.1, 0.7], [2.0, 3.0], [2.5, 2.0], [3.0, 4.0]])
    y = np.array([0, 0, 0, 1, 1, 1])
    fit = recsys.fit_logistic(Z, y)
    scores = fit.coef[0] + Z @ fit.coef[1:]
    assert recsys.roc_auc(scores, y) == 1.0
    assert fit.ridge == 1.0  # separation forces the ridge fallback


def test_logistic_matches_sklearn_unpenalised():
    r = np.random.default_rng(3)
    Z = r.normal(size=(400, 3))
    y = (Z @ [1.0, -0.5, 0.2] + r.logistic(size=400) > 0).astype(int)
    ours = recsys.fit_logistic(Z, y)
    ref = LogisticRegression(penalty=None, tol=1e-12, max_iter=10_000).fit(Z, y)
    assert ours.converged and ours.ridge == 0.0
    assert np.allclose(ours.coef, np.concatenate([ref.intercept_, ref.coef_[0]]), atol=1e-5)


def test_training_classes_balanced():
    g, attrs = netgen.attributed_graph(150, netgen.AttributeSchema.default(), 6.0, 0.8, 1)
    pos, neg = recsys.sample_training_pairs(g, 200, 0)
    assert len(pos) == len(neg) == 200
    assert all(g.has_edge(u, v) for u, v in pos)
    assert not any(g.has_edge(u, v) for u, v in neg)
    model = recsys.train_recsys(g, attrs, 200, 0)
    assert model.n_pos == model.n_neg
    assert model.auc > 0.6


def test_training_caps_at_available_edges():
    g = Graph(6, [(0, 1), (2, 3)])
    pos, neg = recsys.sample_training_pairs(g, 100, 0)
    assert len(pos) == len(neg) == 2


def test_recsys_rank_tie_break_and_cardinality():
    g = Graph(7, [(0, 1)])
    # psi weights only the similarity column, so scores are the hand-set similarities
    model = recsys.RecsysModel(np.array([0.0, 1.0, 0.0, 0.0, 0.0, 0.0]), 1.0, 1, 1, 0.0)

    class Attrs:
        def similarity(self, u, v):
            return {2: 1, 3: 2, 4: 2, 5: 0, 6: 2}[v]

    ranked = recsys.recsys_rank(model, g, Attrs(), 0, [6, 5, 4, 3, 2], 3)
    assert ranked == [3, 4, 6]  # three-way tie at 2 broken by id
    assert len(recsys.recsys_rank(model, g, Attrs(), 0, [6, 5, 4, 3, 2], 10)) == 5
    with pytest.raises(recsys.RecsysError):
        recsys.recsys_rank(model, g, Attrs(), 0, [1, 2], 1)
    with pytest.raises(recsys.RecsysError):
        recsys.recsys_rank(model, g, Attrs(), 0, [], 1)
