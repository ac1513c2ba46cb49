"""Kernel backend selection.

Imports the compiled extension when present, otherwise the pure-Python
fallback. Set STEPGRAPH_PURE_PYTHON=1 to force the fallback (used by the
benchmark and the parity tests). `BACKEND` reports which one is active.
"""

import os

import numpy as np

if os.environ.get("STEPGRAPH_PURE_PYTHON") == "1":
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]

        BACKEND = "c"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"


def dijkstra_dense(cost: np.ndarray, source: int):
    """Run single-source Dijkstra on a dense (K, K) cost matrix.

    Entries must be non-negative; np.inf marks a missing edge. Returns
    (dist, hops, relaxations): minimal path cost from `source` to every
    node, the hop count of the (cost, hops)-lexicographically minimal
    path, and the number of edge relaxations examined.
    """
    c = np.ascontiguousarray(cost, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError("cost matrix must be square")
    K = c.shape[0]
    if not 0 <= source < K:
        raise IndexError(f"source {source} out of range for K={K}")
    dist = np.empty(K, dtype=np.float64)
    hops = np.empty(K, dtype=np.int64)
    relaxations = _impl.dijkstra_dense(c, source, dist, hops)
    return dist, hops, int(relaxations)


def levenshtein(a, b) -> int:
    """Edit distance between two integer sequences."""
    aa = np.ascontiguousarray(a, dtype=np.int64)
    bb = np.ascontiguousarray(b, dtype=np.int64)
    return int(_impl.levenshtein(aa, bb))
