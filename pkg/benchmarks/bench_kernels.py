#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Runs the dense Dijkstra sweep and the Levenshtein DP on growing problem
sizes with both backends and prints a timing table. The compiled backend
is skipped (with a note) when the extension is not built.
"""

import time

import numpy as np

from stepgraph import _kernels_py

try:
    from stepgraph import _ckernels
except ImportError:
    _ckernels = None


def _random_cost(K: int, rng) -> np.ndarray:
    w = rng.random((K, K))
    w[rng.random((K, K)) < 0.7] = 0.0  # sparse support
    np.fill_diagonal(w, 0.0)
    with np.errstate(divide="ignore"):
        cost = np.where(w > 0, -np.log(np.where(w > 0, w, 1.0)), np.inf)
    return np.ascontiguousarray(cost)


def _time_dijkstra(impl, cost, repeats: int) -> float:
    K = cost.shape[0]
    dist = np.empty(K, dtype=np.float64)
    hops = np.empty(K, dtype=np.int64)
    start = time.perf_counter()
    for source in range(repeats):
        impl.dijkstra_dense(cost, source % K, dist, hops)
    return (time.perf_counter() - start) / repeats


def _time_levenshtein(impl, a, b, repeats: int) -> float:
    start = time.perf_counter()
    for _ in range(repeats):
        impl.levenshtein(a, b)
    return (time.perf_counter() - start) / repeats


def main() -> None:
    rng = np.random.default_rng(12345)
    backends = [("python", _kernels_py)]
    if _ckernels is not None:
        backends.append(("c", _ckernels))
    else:
        print("note: compiled extension not built; benchmarking fallback only")

    print(f"{'kernel':<24}{'size':>8}" + "".join(f"{n:>14}" for n, _ in backends)
          + ("  speedup" if len(backends) == 2 else ""))
    for K in (50, 100, 200, 400):
        cost = _random_cost(K, rng)
        times = [_time_dijkstra(impl, cost, repeats=max(2, 2000 // K))
                 for _, impl in backends]
        row = f"{'dijkstra_dense':<24}{f'K={K}':>8}"
        row += "".join(f"{t * 1e3:>12.3f}ms" for t in times)
        if len(times) == 2:
            row += f"  {times[0] / times[1]:>6.1f}x"
        print(row)
    for n in (100, 400, 1600):
        a = rng.integers(0, 50, size=n).astype(np.int64)
        b = rng.integers(0, 50, size=n).astype(np.int64)
        times = [_time_levenshtein(impl, a, b, repeats=max(2, 2000 // n))
                 for _, impl in backends]
        row = f"{'levenshtein':<24}{f'n={n}':>8}"
        row += "".join(f"{t * 1e3:>12.3f}ms" for t in times)
        if len(times) == 2:
            row += f"  {times[0] / times[1]:>6.1f}x"
        print(row)


if __name__ == "__main__":
    main()
