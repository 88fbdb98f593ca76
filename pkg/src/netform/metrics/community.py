"""Weighted modularity and a seeded Louvain optimiser."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from netform import _accel
from netform.graph import Graph
from netform.rng import as_generator

PairWeight = Callable[[int, int], float]


def unit_weight(u: int, v: int) -> float:
    return 1.0


def shared_attribute_weight(attrs) -> PairWeight:
    """``w_ij`` = number of features on which ``i`` and ``j`` agree."""
    def weight(u: int, v: int) -> float:
        return float(attrs.similarity(u, v))

    weight.__name__ = "shared_attributes"
    return weight


@dataclass(frozen=True)
class ModularityResult:
    partition: tuple[int, ...]
    q: float
    weights: str
    resolution: float

    @property
    def n_communities(self) -> int:
        return len(set(self.partition))

    def communities(self) -> list[list[int]]:
        groups: dict[int, list[int]] = {}
        for node, c in enumerate(self.partition):
            groups.setdefault(c, []).append(node)
        return sorted(groups.values(), key=lambda c: c[0])


def _weighted_csr(g: Graph, pair_weight: PairWeight):
    indptr, indices = g.csr()
    rows = np.repeat(np.arange(g.n), np.diff(indptr))
    weights = np.array([pair_weight(int(u), int(v)) for u, v in zip(rows, indices)], dtype=np.float64)
    if np.any(weights < 0):
        raise ValueError("pair weights must be non-negative")
    return indptr, indices, weights


def modularity(g: Graph, partition, pair_weight: PairWeight = unit_weight, resolution: float = 1.0) -> float:
    """``sum_c [L_c / W - r (k_c / 2W)^2]`` for the given partition."""
    partition = np.asarray(partition, dtype=np.int64)
    if partition.size != g.n:
        raise ValueError("partition must assign every node")
    indptr, indices, weights = _weighted_csr(g, pair_weight)
    total = weights.sum() / 2.0
    if total <= 0:
        raise ValueError("modularity undefined: total edge weight is zero")
    rows = np.repeat(np.arange(g.n), np.diff(indptr))
    _, labels = np.unique(partition, return_inverse=True)
    n_c = labels.max() + 1
    inside = np.bincount(labels[rows], weights=weights * (labels[rows] == labels[indices]), minlength=n_c) / 2.0
    strength = np.bincount(labels[rows], weights=weights, minlength=n_c)
    return float(np.sum(inside / total - resolution * (strength / (2.0 * total)) ** 2))


def _aggregate(indptr, indices, weights, loops, comm):
    """Collapse communities into super-nodes; intra weight becomes a self-loop."""
    _, labels = np.unique(comm, return_inverse=True)
    n_new = int(labels.max()) + 1
    rows = np.repeat(np.arange(indptr.size - 1), np.diff(indptr))
    cu = labels[rows]
    cv = labels[indices]
    new_loops = np.bincount(labels, weights=loops, minlength=n_new)
    same = cu == cv
    new_loops += np.bincount(cu[same], weights=weights[same], minlength=n_new) / 2.0
    cross = ~same
    keys = cu[cross] * n_new + cv[cross]
    uniq, inv = np.unique(keys, return_inverse=True)
    w = np.bincount(inv, weights=weights[cross])
    src = uniq // n_new
    dst = uniq % n_new
    new_indptr = np.zeros(n_new + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n_new), out=new_indptr[1:])
    return new_indptr, dst.astype(np.int64), w, new_loops, labels


def louvain_modularity(g: Graph, pair_weight: PairWeight = unit_weight, resolution: float = 1.0,
                       seed=0, max_levels: int = 50) -> ModularityResult:
    """Louvain with a seeded random node order at every level.

    The returned ``q`` is recomputed from the original graph for the final
    partition.
    """
    indptr, indices, weights = _weighted_csr(g, pair_weight)
    total = weights.sum() / 2.0
    if total <= 0:
        raise ValueError("Louvain needs at least one edge with positive weight")
    rng = as_generator(seed)
    membership = np.arange(g.n, dtype=np.int64)
    loops = np.zeros(g.n)
    cur = (indptr, indices, weights)
    for _ in range(max_levels):
        ip, ix, w = cur
        n_nodes = ip.size - 1
        strength = np.bincount(np.repeat(np.arange(n_nodes), np.diff(ip)), weights=w, minlength=n_nodes) + 2.0 * loops
        comm = np.arange(n_nodes, dtype=np.int64)
        tot = strength.copy()
        order = rng.permutation(n_nodes)
        moves = _accel.louvain_moves(ip, ix, w, strength, comm, tot, order, total, resolution)
        if moves == 0:
            break
        ip, ix, w, loops, labels = _aggregate(ip, ix, w, loops, comm)
        membership = labels[membership]
        cur = (ip, ix, w)
    # relabel by first appearance so partitions are canonical
    _, first = np.unique(membership, return_index=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first)] = np.arange(first.size)
    _, inv = np.unique(membership, return_inverse=True)
    membership = rank[inv]
    q = modularity(g, membership, pair_weight, resolution)
    name = getattr(pair_weight, "__name__", "custom")
    return ModularityResult(tuple(int(c) for c in membership), q, name, float(resolution))
