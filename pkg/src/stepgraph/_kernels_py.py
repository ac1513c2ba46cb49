"""Pure-Python kernels, used when the compiled extension is unavailable.

These must stay behaviorally identical to stepgraph._ckernels:
tests/test_kernels.py enforces parity on distances, hop counts,
relaxation counts and edit distances.
"""

import numpy as np


def dijkstra_dense(cost, source, dist, hops):
    """Single-source shortest paths on a dense cost matrix.

    Path lengths are compared lexicographically as (cost, hops), so among
    equal-cost paths the one with fewer edges wins. `dist` and `hops` are
    filled in place; the return value is the number of edge relaxations
    examined (one per candidate edge out of a settled node), which is the
    quantity the complexity checks measure.
    """
    K = cost.shape[0]
    dist[:] = np.inf
    hops[:] = 0
    dist[source] = 0.0
    visited = np.zeros(K, dtype=bool)
    relaxations = 0

    for _ in range(K):
        open_d = np.where(visited, np.inf, dist)
        d_min = open_d.min()
        if not np.isfinite(d_min):
            break
        cand = np.flatnonzero(~visited & (dist == d_min))
        u = int(cand[np.argmin(hops[cand])])
        visited[u] = True
        n_open = K - int(visited.sum())
        if n_open == 0:
            break
        relaxations += n_open
        nd = dist[u] + cost[u]
        nh = hops[u] + 1
        better = ~visited & ((nd < dist) | ((nd == dist) & (nh < hops)))
        dist[better] = nd[better]
        hops[better] = nh
    return relaxations


def levenshtein(a, b):
    """Edit distance between two integer sequences (two-row DP)."""
    n = len(a)
    m = len(b)
    if n == 0:
        return m
    if m == 0:
        return n
    prev = list(range(m + 1))
    cur = [0] * (m + 1)
    for i in range(1, n + 1):
        cur[0] = i
        ai = a[i - 1]
        for j in range(1, m + 1):
            sub = prev[j - 1] + (0 if ai == b[j - 1] else 1)
            dele = prev[j] + 1
            ins = cur[j - 1] + 1
            best = sub if sub < dele else dele
            cur[j] = best if best < ins else ins
        prev, cur = cur, prev
    return prev[m]
