"""Transitivity, assortativity, within-block edge share and small-world metrics."""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from netform.graph import Graph, GraphDiff, GraphError, edge_diff
from netform.metrics.stats import DegenerateInputError


class UndefinedMetricError(ValueError):
    """Metric has no defined value for this input (e.g. no new edges)."""


def transitivity(g: Graph) -> float:
    """``3 * triangles / connected triples``; 0 when there are no triples."""
    deg = g.degrees().astype(np.float64)
    triads = float((deg * (deg - 1.0) / 2.0).sum())
    if triads == 0.0:
        return 0.0
    closed = float(g.triangles().sum())  # each triangle counted at its 3 corners
    return closed / triads


def marginal_transitivity(g1: Graph, gT: Graph) -> float:
    if g1.n != gT.n:
        raise GraphError(f"node sets differ: {g1.n} vs {gT.n} nodes")
    return transitivity(gT) - transitivity(g1)


def within_community_edge_prob(diff: GraphDiff, labels: Mapping[int, object] | Sequence) -> float:
    """Share of newly added edges whose endpoints carry the same label."""
    if len(diff.added_edges) == 0:
        raise UndefinedMetricError("within-community edge probability is undefined without new edges")
    same = sum(1 for u, v in diff.added_edges if labels[u] == labels[v])
    return same / len(diff.added_edges)


def within_community_edge_prob_graphs(g1: Graph, gT: Graph, labels) -> float:
    return within_community_edge_prob(edge_diff(g1, gT), labels)


def mixing_matrix(g: Graph, values: Sequence) -> tuple[np.ndarray, list]:
    """Symmetric edge mixing matrix normalised to sum 1."""
    values = list(values)
    edges = g.edges()
    if not edges:
        raise DegenerateInputError("assortativity needs at least one edge")
    touched = sorted({values[u] for e in edges for u in e}, key=lambda x: (str(type(x)), x))
    index = {v: i for i, v in enumerate(touched)}
    mix = np.zeros((len(touched), len(touched)))
    for u, v in edges:
        a, b = index[values[u]], index[values[v]]
        mix[a, b] += 1.0
        mix[b, a] += 1.0
    return mix / mix.sum(), touched


def attribute_assortativity(g: Graph, values: Sequence) -> float:
    """Newman's attribute assortativity ``(tr M - sum a b) / (1 - sum a b)``."""
    mix, _ = mixing_matrix(g, values)
    a = mix.sum(axis=1)
    b = mix.sum(axis=0)
    ab = float(a @ b)
    denom = 1.0 - ab
    if denom <= 1e-15:
        raise DegenerateInputError("assortativity undefined: attribute takes a single value on edge endpoints")
    r = (float(np.trace(mix)) - ab) / denom
    return float(min(1.0, max(-1.0, r)))


def average_clustering(g: Graph) -> float:
    if g.n == 0:
        return 0.0
    return float(g.local_clustering().mean())


def average_shortest_path(g: Graph, strict: bool = False) -> float:
    """Mean hop distance over node pairs of the largest component.

    With ``strict=True`` a disconnected graph raises instead.
    """
    comps = g.connected_components()
    if strict and len(comps) > 1:
        raise GraphError("graph is disconnected")
    if not comps or len(comps[0]) < 2:
        raise GraphError("average shortest path needs a component with at least 2 nodes")
    lcc = comps[0]
    dist = g.distances(lcc)[:, lcc].astype(np.float64)
    k = len(lcc)
    return float(dist.sum() / (k * (k - 1)))


def small_world_metrics(g: Graph, strict: bool = False) -> tuple[float, float]:
    """``(L, C)``: largest-component mean path length and mean local clustering."""
    return average_shortest_path(g, strict=strict), average_clustering(g)
