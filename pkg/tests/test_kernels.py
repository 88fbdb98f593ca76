import os
import subprocess
import sys

import numpy as np
import pytest

from netform import _accel, netgen
from netform.metrics.community import louvain_modularity


def graphs():
    yield netgen.erdos_renyi(60, 0.08, 1)
    yield netgen.barabasi_albert(200, 2, 3)
    yield netgen.watts_strogatz(50, 4, 0.3, 2)
    yield netgen.erdos_renyi(30, 0.02, 5)  # several components


@pytest.mark.parametrize("g", list(graphs()))
def test_bfs_paths_agree(g):
    indptr, indices = g.csr()
    src = np.arange(g.n, dtype=np.int64)
    k = _accel.KERNELS["bfs_distances"]
    ref = k["loop"](indptr, indices, g.n, src)
    for path in set(k) - {"loop"}:
        assert np.array_equal(k[path](indptr, indices, g.n, src), ref), path


@pytest.mark.parametrize("g", list(graphs()))
def test_triangle_paths_agree(g):
    indptr, indices = g.csr()
    k = _accel.KERNELS["triangles"]
    ref = k["loop"](indptr, indices, g.n)
    for path in set(k) - {"loop"}:
        assert np.array_equal(k[path](indptr, indices, g.n), ref), path


@pytest.mark.parametrize("g", list(graphs()))
def test_louvain_paths_agree(g):
    if "numba" not in _accel.KERNELS["louvain_moves"]:
        pytest.skip("numba unavailable; only the loop path exists")
    indptr, indices = g.csr()
    w = np.ones(indices.size)
    strength = np.bincount(np.repeat(np.arange(g.n), np.diff(indptr)), weights=w, minlength=g.n)
    order = np.random.default_rng(0).permutation(g.n)
    outs = []
    for path in ("loop", "numba"):
        comm = np.arange(g.n, dtype=np.int64)
        tot = strength.copy()
        moves = _accel.KERNELS["louvain_moves"][path](indptr, indices, w, strength, comm, tot, order,
                                                       w.sum() / 2, 1.0, 1000)
        outs.append((moves, comm.tolist(), tot.round(9).tolist()))
    assert outs[0] == outs[1]


def test_disable_flag_selects_numpy_backend():
    code = ("from netform import _accel, netgen\n"
            "from netform.metrics.community import louvain_modularity\n"
            "g = netgen.barabasi_albert(120, 2, 0)\n"
            "print(_accel.BACKEND, g.triangles().sum(), round(louvain_modularity(g, seed=0).q, 12))")
    env = dict(os.environ, NETFORM_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    backend, tri, q = out.stdout.split()
    assert backend == "numpy"
    g = netgen.barabasi_albert(120, 2, 0)
    assert int(tri) == int(g.triangles().sum())
    assert float(q) == pytest.approx(round(louvain_modularity(g, seed=0).q, 12), abs=1e-12)


def test_dispatch_matches_reference_on_active_backend():
    g = netgen.barabasi_albert(150, 2, 1)
    indptr, indices = g.csr()
    assert np.array_equal(_accel.triangles(indptr, indices, g.n),
                          _accel.KERNELS["triangles"]["loop"](indptr, indices, g.n))
    assert np.array_equal(_accel.bfs_distances(indptr, indices, g.n),
                          _accel.KERNELS["bfs_distances"]["loop"](indptr, indices, g.n, np.arange(g.n)))
