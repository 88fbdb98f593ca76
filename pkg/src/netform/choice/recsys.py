"""Logistic link-prediction recommender used to build candidate sets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from netform.graph import Graph
from netform.rng import as_generator

RECSYS_FEATURES = ("similarity", "common_neighbors", "pref_attachment", "adamic_adar", "jaccard")


class RecsysError(ValueError):
    pass


def pair_features(g: Graph, attrs, u: int, v: int) -> np.ndarray:
    """``(w, c, d_u d_v, Adamic-Adar, Jaccard)`` for one pair; natural log in Adamic-Adar."""
    nu, nv = g.neighbor_set(u), g.neighbor_set(v)
    common = nu & nv
    union = len(nu | nv)
    aa = sum(1.0 / np.log(g.degree(k)) for k in common)
    w = attrs.similarity(u, v) if attrs is not None else 0
    return np.array([w, len(common), len(nu) * len(nv), aa, len(common) / union if union else 0.0])


def pair_feature_matrix(g: Graph, attrs, u: int, others: Sequence[int]) -> np.ndarray:
    return np.array([pair_features(g, attrs, u, int(v)) for v in others], dtype=np.float64).reshape(-1, 5)


def roc_auc(scores, labels) -> float:
    """Mann-Whitney AUC with average ranks for ties."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(bool)
    n_pos, n_neg = int(labels.sum()), int((~labels).sum())
    if n_pos == 0 or n_neg == 0:
        raise RecsysError("AUC needs both classes")
    ranks = stats.rankdata(scores)
    return float((ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


@dataclass(frozen=True)
class LogisticFit:
    coef: np.ndarray  # intercept first, original feature scale
    ridge: float
    converged: bool


def fit_logistic(Z, y, ridge: float = 0.0, max_iter: int = 100, tol: float = 1e-10,
                 separation_bound: float = 30.0) -> LogisticFit:
    """Newton-Raphson on standardised features with an intercept.

    If the unpenalised fit diverges (perfect or quasi separation) it is redone
    with a unit ridge penalty on the slopes.
    """
    Z = np.asarray(Z, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if Z.ndim != 2 or Z.shape[0] != y.size:
        raise RecsysError("feature matrix and labels disagree in length")
    if y.min() == y.max():
        raise RecsysError("logistic regression needs both classes")
    mu = Z.mean(axis=0)
    sd = Z.std(axis=0)
    sd[sd == 0] = 1.0
    X = np.column_stack([np.ones(len(y)), (Z - mu) / sd])
    beta = np.zeros(X.shape[1])
    penalty = np.full(X.shape[1], ridge)
    penalty[0] = 0.0
    converged = False
    for _ in range(max_iter):
        eta = X @ beta
        p = 1.0 / (1.0 + np.exp(-eta))
        grad = X.T @ (y - p) - penalty * beta
        W = p * (1.0 - p)
        H = (X * W[:, None]).T @ X + np.diag(penalty) + 1e-12 * np.eye(X.shape[1])
        step = np.linalg.solve(H, grad)
        beta = beta + step
        if np.max(np.abs(beta)) > separation_bound:
            break
        if np.max(np.abs(step)) < tol:
            converged = True
            break
    if not converged and ridge == 0.0:
        return fit_logistic(Z, y, ridge=1.0, max_iter=max_iter, tol=tol, separation_bound=np.inf)
    slopes = beta[1:] / sd
    intercept = beta[0] - float(slopes @ mu)
    return LogisticFit(np.concatenate([[intercept], slopes]), ridge, converged)


@dataclass(frozen=True)
class RecsysModel:
    psi: np.ndarray  # intercept + one weight per RECSYS_FEATURES entry
    auc: float
    n_pos: int
    n_neg: int
    ridge: float

    def score(self, features: np.ndarray) -> np.ndarray:
        features = np.asarray(features, dtype=np.float64).reshape(-1, len(RECSYS_FEATURES))
        return self.psi[0] + features @ self.psi[1:]


def sample_training_pairs(g: Graph, sample_size: int, rng) -> tuple[list, list]:
    rng = as_generator(rng)
    edges = g.edges()
    n_pairs = g.n * (g.n - 1) // 2
    n_pos = min(int(sample_size), len(edges), n_pairs - len(edges))
    if n_pos < 1:
        raise RecsysError("graph has too few edges or non-edges to build balanced classes")
    pos_idx = rng.choice(len(edges), size=n_pos, replace=False)
    pos = [edges[i] for i in sorted(pos_idx)]
    neg: set[tuple[int, int]] = set()
    while len(neg) < n_pos:
        u, v = (int(x) for x in rng.integers(0, g.n, size=2))
        if u == v or g.has_edge(u, v):
            continue
        neg.add((min(u, v), max(u, v)))
    return pos, sorted(neg)


def train_recsys(g1: Graph, attrs, sample_size: int = 1000, seed=0) -> RecsysModel:
    """Fit the recommender on equally many edges and non-edges of ``g1``."""
    pos, neg = sample_training_pairs(g1, sample_size, seed)
    Z = np.array([pair_features(g1, attrs, u, v) for u, v in pos + neg])
    y = np.concatenate([np.ones(len(pos)), np.zeros(len(neg))])
    fit = fit_logistic(Z, y)
    scores = fit.coef[0] + Z @ fit.coef[1:]
    return RecsysModel(fit.coef, roc_auc(scores, y), len(pos), len(neg), fit.ridge)


def recsys_rank(model: RecsysModel, g: Graph, attrs, i: int, pool: Sequence[int], A: int) -> list[int]:
    """Top-``A`` of ``pool`` by descending score, ties to the lower id."""
    pool = [int(v) for v in pool]
    if not pool:
        raise RecsysError("empty candidate pool")
    nb = g.neighbor_set(i)
    bad = [v for v in pool if v == i or v in nb]
    if bad:
        raise RecsysError(f"pool contains the chooser or its neighbours: {bad[:5]}")
    scores = model.score(pair_feature_matrix(g, attrs, i, pool))
    order = sorted(range(len(pool)), key=lambda j: (-scores[j], pool[j]))
    return [pool[j] for j in order[:A]]
