"""Undirected simple graph with dense integer node ids."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from netform import _accel

Edge = tuple[int, int]

# full SVD below this size, truncated iterative SVD above it
FULL_SPECTRUM_MAX_N = 2000
TRUNCATED_SPECTRUM_K = 500


class GraphError(ValueError):
    """Invalid graph operation (self-loop, unknown node, mismatched node sets)."""


class Graph:
    """Undirected simple graph on nodes ``0..n-1``.

    Edges are added with :meth:`add_edge` (idempotent).  A frozen graph rejects
    mutation and can be shared freely between metric computations.
    """

    __slots__ = ("_adj", "_m", "_frozen", "_csr")

    def __init__(self, n: int, edges: Iterable[Edge] = ()):
        if n < 0:
            raise GraphError(f"node count must be non-negative, got {n}")
        self._adj: list[set[int]] = [set() for _ in range(int(n))]
        self._m = 0
        self._frozen = False
        self._csr = None
        for u, v in edges:
            self.add_edge(u, v)

    # -- basic properties -------------------------------------------------
    @property
    def n(self) -> int:
        return len(self._adj)

    @property
    def edge_count(self) -> int:
        return self._m

    @property
    def frozen(self) -> bool:
        return self._frozen

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self._m})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self._adj == other._adj

    def _check(self, u: int) -> int:
        if not isinstance(u, (int, np.integer)) or isinstance(u, bool):
            raise GraphError(f"node id must be an integer, got {u!r}")
        u = int(u)
        if u < 0 or u >= len(self._adj):
            raise GraphError(f"unknown node id {u} (graph has {len(self._adj)} nodes)")
        return u

    def _mutable(self) -> None:
        if self._frozen:
            raise GraphError("graph is frozen")
        self._csr = None

    # -- mutation -----------------------------------------------------------
    def add_edge(self, u: int, v: int) -> bool:
        """Insert ``{u, v}``; returns False if it was already present."""
        u, v = self._check(u), self._check(v)
        if u == v:
            raise GraphError(f"self-loop on node {u} rejected")
        self._mutable()
        if v in self._adj[u]:
            return False
        self._adj[u].add(v)
        self._adj[v].add(u)
        self._m += 1
        return True

    def _remove_edge(self, u: int, v: int) -> None:
        # only the small-world rewiring driver removes edges
        u, v = self._check(u), self._check(v)
        self._mutable()
        if v not in self._adj[u]:
            raise GraphError(f"edge ({u}, {v}) not present")
        self._adj[u].discard(v)
        self._adj[v].discard(u)
        self._m -= 1

    def copy(self) -> "Graph":
        g = Graph(self.n)
        g._adj = [set(s) for s in self._adj]
        g._m = self._m
        return g

    def freeze(self) -> "Graph":
        """Return an immutable snapshot (self if already frozen)."""
        if self._frozen:
            return self
        g = self.copy()
        g._frozen = True
        return g

    # -- queries ----------------------------------------------------------
    def has_edge(self, u: int, v: int) -> bool:
        u, v = self._check(u), self._check(v)
        return v in self._adj[u]

    def neighbors(self, u: int) -> list[int]:
        return sorted(self._adj[self._check(u)])

    def neighbor_set(self, u: int) -> frozenset[int]:
        return frozenset(self._adj[self._check(u)])

    def degree(self, u: int) -> int:
        return len(self._adj[self._check(u)])

    def degrees(self) -> np.ndarray:
        return np.fromiter((len(s) for s in self._adj), dtype=np.int64, count=self.n)

    def edges(self) -> list[Edge]:
        """Sorted list of ``(u, v)`` with ``u < v``."""
        return sorted((u, v) for u, nb in enumerate(self._adj) for v in nb if u < v)

    def iter_edges(self) -> Iterator[Edge]:
        for u, nb in enumerate(self._adj):
            for v in sorted(nb):
                if u < v:
                    yield (u, v)

    def edge_set(self) -> set[Edge]:
        return {(u, v) for u, nb in enumerate(self._adj) for v in nb if u < v}

    def common_neighbors(self, u: int, v: int) -> list[int]:
        u, v = self._check(u), self._check(v)
        if u == v:
            raise GraphError("common_neighbors needs two distinct nodes")
        return sorted(self._adj[u] & self._adj[v])

    def common_neighbor_count(self, u: int, v: int) -> int:
        return len(self._adj[u] & self._adj[v])

    def non_neighbors(self, u: int) -> list[int]:
        u = self._check(u)
        nb = self._adj[u]
        return [v for v in range(self.n) if v != u and v not in nb]

    # -- array views --------------------------------------------------------
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) with sorted neighbor lists."""
        if self._csr is not None:
            return self._csr
        deg = self.degrees()
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        indices = np.empty(int(indptr[-1]), dtype=np.int64)
        for u, nb in enumerate(self._adj):
            indices[indptr[u]:indptr[u + 1]] = sorted(nb)
        self._csr = (indptr, indices)
        return self._csr

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.float64)
        indptr, indices = self.csr()
        rows = np.repeat(np.arange(self.n), np.diff(indptr))
        a[rows, indices] = 1.0
        return a

    # -- structure --------------------------------------------------------
    def connected_components(self) -> list[list[int]]:
        """Components as sorted node lists, largest first (ties by smallest id)."""
        seen = np.zeros(self.n, dtype=bool)
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            stack = [s]
            seen[s] = True
            comp = []
            while stack:
                u = stack.pop()
                comp.append(u)
                for v in self._adj[u]:
                    if not seen[v]:
                        seen[v] = True
                        stack.append(v)
            comps.append(sorted(comp))
        comps.sort(key=lambda c: (-len(c), c[0]))
        return comps

    def distances(self, sources: Iterable[int] | None = None) -> np.ndarray:
        """BFS hop distances, shape ``(len(sources), n)``; ``-1`` if unreachable."""
        indptr, indices = self.csr()
        src = None if sources is None else np.array([self._check(s) for s in sources], dtype=np.int64)
        return _accel.bfs_distances(indptr, indices, self.n, src)

    def triangles(self) -> np.ndarray:
        indptr, indices = self.csr()
        return _accel.triangles(indptr, indices, self.n)

    def local_clustering(self) -> np.ndarray:
        """Local clustering per node; 0 for nodes of degree < 2."""
        deg = self.degrees().astype(np.float64)
        tri = self.triangles().astype(np.float64)
        pairs = deg * (deg - 1.0) / 2.0
        out = np.zeros(self.n, dtype=np.float64)
        mask = pairs > 0
        out[mask] = tri[mask] / pairs[mask]
        return out

    def singular_values(self) -> np.ndarray:
        """Adjacency singular values, descending."""
        if self.n == 0:
            return np.zeros(0)
        if self._m == 0:
            return np.zeros(min(self.n, TRUNCATED_SPECTRUM_K) if self.n > FULL_SPECTRUM_MAX_N else self.n)
        if self.n <= FULL_SPECTRUM_MAX_N:
            return np.linalg.svd(self.adjacency_matrix(), compute_uv=False)
        from scipy.sparse import csr_matrix
        from scipy.sparse.linalg import svds

        indptr, indices = self.csr()
        a = csr_matrix((np.ones(indices.size), indices, indptr), shape=(self.n, self.n))
        s = svds(a, k=TRUNCATED_SPECTRUM_K, return_singular_vectors=False, random_state=0)
        return np.sort(s)[::-1]

    def structure_queries(self) -> dict:
        return {
            "degrees": self.degrees(),
            "components": self.connected_components(),
            "local_clustering": self.local_clustering(),
            "singular_values": self.singular_values(),
        }

    def check_invariants(self) -> None:
        """Raise AssertionError if symmetry / loop / count invariants fail."""
        total = 0
        for u, nb in enumerate(self._adj):
            assert u not in nb, f"self-loop at {u}"
            for v in nb:
                assert u in self._adj[v], f"asymmetric edge {u}->{v}"
            total += len(nb)
        assert total == 2 * self._m, "edge count does not match degree sum"


@dataclass(frozen=True)
class GraphDiff:
    added_edges: frozenset[Edge]
    base_edge_count: int
    final_edge_count: int

    def __len__(self) -> int:
        return len(self.added_edges)

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.added_edges)


def edge_diff(g1: Graph, gT: Graph) -> GraphDiff:
    """Edges of ``gT`` that are not in ``g1``."""
    if g1.n != gT.n:
        raise GraphError(f"node sets differ: {g1.n} vs {gT.n} nodes")
    added = gT.edge_set() - g1.edge_set()
    return GraphDiff(frozenset(added), g1.edge_count, gT.edge_count)


def complete_graph(n: int) -> Graph:
    return Graph(n, ((u, v) for u in range(n) for v in range(u + 1, n)))


def path_graph(n: int) -> Graph:
    return Graph(n, ((i, i + 1) for i in range(n - 1)))
