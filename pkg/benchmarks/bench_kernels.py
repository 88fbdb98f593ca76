#!/usr/bin/env python
"""Time the numba kernels against their pure-numpy / pure-python fallbacks.

Usage:
    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --sizes 200 1000 3000 --repeat 5
    python benchmarks/bench_kernels.py --output bench.json

With ``NETFORM_DISABLE_NUMBA=1`` (or without numba installed) only the
fallback paths are timed.
"""

import argparse
import json
import time

import numpy as np

from netform import _accel
from netform.netgen import barabasi_albert


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def louvain_inputs(indptr, indices, seed):
    n = indptr.size - 1
    w = np.ones(indices.size)
    strength = np.bincount(np.repeat(np.arange(n), np.diff(indptr)), weights=w, minlength=n)
    order = np.random.default_rng(seed).permutation(n)
    return w, strength, order, w.sum() / 2.0


def _kernel_calls(g, bfs_sources, seed):
    """Per kernel, a function of the implementation that runs it on ``g``."""
    n = g.n
    indptr, indices = g.csr()
    src = np.arange(min(bfs_sources, n), dtype=np.int64)
    w, strength, order, m = louvain_inputs(indptr, indices, seed)

    def louvain(fn):
        comm = np.arange(n, dtype=np.int64)
        fn(indptr, indices, w, strength, comm, strength.copy(), order, m, 1.0, 1000)
        return comm

    return {
        "bfs_distances": lambda fn: fn(indptr, indices, n, src),
        "triangles": lambda fn: fn(indptr, indices, n),
        "louvain_moves": louvain,
    }


def bench_size(n, repeat, bfs_sources):
    g = barabasi_albert(n, 3, n)
    rows = []
    for kernel, call in _kernel_calls(g, bfs_sources, n).items():
        paths = _accel.KERNELS[kernel]
        # the plain loop is the reference implementation; time it last
        for path in sorted(paths, key=lambda p: p == "loop"):
            seconds, out = best_of(lambda: call(paths[path]), repeat)
            rows.append({"n": n, "kernel": kernel, "path": path, "seconds": seconds, "out": out})
        reference = rows[-1]["out"]
        for r in rows:
            if r["kernel"] == kernel and "out" in r:
                r["matches_loop"] = bool(np.array_equal(r.pop("out"), reference))
    return rows


def warmup():
    if "numba" not in _accel.KERNELS["triangles"]:
        return
    g = barabasi_albert(30, 2, 0)
    for kernel, call in _kernel_calls(g, 2, 0).items():
        call(_accel.KERNELS[kernel]["numba"])


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[200, 1000, 3000])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--bfs-sources", type=int, default=200)
    parser.add_argument("--output")
    args = parser.parse_args(argv)

    print(f"backend: {_accel.BACKEND}")
    t0 = time.perf_counter()
    warmup()
    print(f"jit warm-up: {time.perf_counter() - t0:.2f}s")

    rows = []
    for n in args.sizes:
        rows.extend(bench_size(n, args.repeat, args.bfs_sources))

    print(f"{'n':>6} {'kernel':<15}{'path':<7}{'seconds':>11}  same as loop")
    for r in rows:
        print(f"{r['n']:>6} {r['kernel']:<15}{r['path']:<7}{r['seconds']:>11.5f}  {'yes' if r['matches_loop'] else 'NO'}")
    if args.output:
        with open(args.output, "w") as fh:
            json.dump({"backend": _accel.BACKEND, "rows": rows}, fh, indent=2)


if __name__ == "__main__":
    main()
