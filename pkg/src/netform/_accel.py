"""Hot graph kernels with a numba path and a pure-numpy fallback.

Set ``NETFORM_DISABLE_NUMBA=1`` to force the numpy path (also used when numba
is not importable).  Both paths return identical results; ``benchmarks/``
compares their runtime.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("NETFORM_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError("numba disabled by NETFORM_DISABLE_NUMBA")
    import numba

    HAVE_NUMBA = True
except ImportError:
    numba = None
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def _maybe_njit(fn):
    if numba is None:
        return None
    return numba.njit(cache=True, nogil=True)(fn)


# --------------------------------------------------------------------------
# breadth-first distances

def _bfs_distances_loop(indptr, indices, n, sources):
    out = np.full((sources.shape[0], n), -1, dtype=np.int32)
    queue = np.empty(n, dtype=np.int64)
    for s_idx in range(sources.shape[0]):
        src = sources[s_idx]
        row = out[s_idx]
        row[src] = 0
        head = 0
        tail = 0
        queue[tail] = src
        tail += 1
        while head < tail:
            u = queue[head]
            head += 1
            du = row[u] + 1
            for p in range(indptr[u], indptr[u + 1]):
                v = indices[p]
                if row[v] < 0:
                    row[v] = du
                    queue[tail] = v
                    tail += 1
    return out


def _bfs_distances_numpy(indptr, indices, n, sources):
    adj = np.zeros((n, n), dtype=np.float32)
    rows = np.repeat(np.arange(n), np.diff(indptr))
    adj[rows, indices] = 1.0
    m = sources.shape[0]
    out = np.full((m, n), -1, dtype=np.int32)
    frontier = np.zeros((m, n), dtype=bool)
    frontier[np.arange(m), sources] = True
    out[frontier] = 0
    visited = frontier.copy()
    depth = 0
    while frontier.any():
        depth += 1
        reached = (frontier.astype(np.float32) @ adj) > 0
        reached &= ~visited
        out[reached] = depth
        visited |= reached
        frontier = reached
    return out


# --------------------------------------------------------------------------
# per-node triangle counts

def _triangles_loop(indptr, indices, n):
    tri = np.zeros(n, dtype=np.int64)
    for u in range(n):
        for p in range(indptr[u], indptr[u + 1]):
            v = indices[p]
            if v <= u:
                continue
            # sorted merge of N(u) and N(v)
            a = indptr[u]
            b = indptr[v]
            a_end = indptr[u + 1]
            b_end = indptr[v + 1]
            c = 0
            while a < a_end and b < b_end:
                x = indices[a]
                y = indices[b]
                if x == y:
                    c += 1
                    a += 1
                    b += 1
                elif x < y:
                    a += 1
                else:
                    b += 1
            tri[u] += c
            tri[v] += c
    return tri // 2


def _triangles_numpy(indptr, indices, n):
    adj = np.zeros((n, n), dtype=np.float64)
    rows = np.repeat(np.arange(n), np.diff(indptr))
    adj[rows, indices] = 1.0
    paths = adj @ adj
    return np.rint((paths * adj).sum(axis=1) / 2.0).astype(np.int64)


# --------------------------------------------------------------------------
# Louvain local-moving phase

def louvain_moves_py(indptr, indices, weights, strength, comm, tot, order, m, resolution, max_passes):
    """One Louvain level: greedily move nodes until a pass makes no move.

    ``comm`` and ``tot`` are updated in place.  Returns the number of moves.
    """
    n = strength.shape[0]
    neigh_w = np.zeros(n, dtype=np.float64)
    neigh_c = np.empty(n, dtype=np.int64)
    moves = 0
    for _ in range(max_passes):
        moved = 0
        for idx in range(order.shape[0]):
            i = order[idx]
            ci = comm[i]
            ki = strength[i]
            n_seen = 0
            for p in range(indptr[i], indptr[i + 1]):
                j = indices[p]
                if j == i:
                    continue
                cj = comm[j]
                if neigh_w[cj] == 0.0:
                    neigh_c[n_seen] = cj
                    n_seen += 1
                neigh_w[cj] += weights[p]
            tot[ci] -= ki
            best_c = ci
            best_gain = neigh_w[ci] - resolution * tot[ci] * ki / (2.0 * m)
            for s in range(n_seen):
                c = neigh_c[s]
                gain = neigh_w[c] - resolution * tot[c] * ki / (2.0 * m)
                if gain > best_gain + 1e-12:
                    best_gain = gain
                    best_c = c
            tot[best_c] += ki
            if best_c != ci:
                comm[i] = best_c
                moved += 1
            for s in range(n_seen):
                neigh_w[neigh_c[s]] = 0.0
            neigh_w[ci] = 0.0
        moves += moved
        if moved == 0:
            break
    return moves


_bfs_distances_jit = _maybe_njit(_bfs_distances_loop)
_triangles_jit = _maybe_njit(_triangles_loop)
_louvain_moves_jit = _maybe_njit(louvain_moves_py)


def bfs_distances(indptr, indices, n, sources=None):
    """Unweighted shortest-path lengths from each source (``-1`` = unreachable)."""
    indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    if sources is None:
        sources = np.arange(n, dtype=np.int64)
    sources = np.ascontiguousarray(sources, dtype=np.int64)
    if n == 0 or sources.size == 0:
        return np.zeros((sources.size, n), dtype=np.int32)
    if HAVE_NUMBA:
        return _bfs_distances_jit(indptr, indices, n, sources)
    return _bfs_distances_numpy(indptr, indices, n, sources)


def triangles(indptr, indices, n):
    """Number of triangles through each node."""
    indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    if HAVE_NUMBA:
        return _triangles_jit(indptr, indices, n)
    return _triangles_numpy(indptr, indices, n)


def louvain_moves(indptr, indices, weights, strength, comm, tot, order, m, resolution, max_passes=1000):
    args = (
        np.ascontiguousarray(indptr, dtype=np.int64),
        np.ascontiguousarray(indices, dtype=np.int64),
        np.ascontiguousarray(weights, dtype=np.float64),
        np.ascontiguousarray(strength, dtype=np.float64),
        comm,
        tot,
        np.ascontiguousarray(order, dtype=np.int64),
        float(m),
        float(resolution),
        int(max_passes),
    )
    if HAVE_NUMBA:
        return _louvain_moves_jit(*args)
    return louvain_moves_py(*args)


# explicit handles so tests and benchmarks can exercise both paths; the
# "numba" entries are absent when numba is unavailable or disabled
KERNELS = {
    "bfs_distances": {"numpy": _bfs_distances_numpy, "loop": _bfs_distances_loop},
    "triangles": {"numpy": _triangles_numpy, "loop": _triangles_loop},
    "louvain_moves": {"loop": louvain_moves_py},
}
if HAVE_NUMBA:
    KERNELS["bfs_distances"]["numba"] = _bfs_distances_jit
    KERNELS["triangles"]["numba"] = _triangles_jit
    KERNELS["louvain_moves"]["numba"] = _louvain_moves_jit
