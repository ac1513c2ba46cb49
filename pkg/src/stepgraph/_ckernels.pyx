# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: dense Dijkstra with hop tie-breaking, Levenshtein DP.

Behavior must match stepgraph._kernels_py exactly; tests/test_kernels.py
enforces parity on distances, hops, relaxation counts and edit distances.
"""

from libc.stdlib cimport free, malloc


def dijkstra_dense(double[:, ::1] cost, Py_ssize_t source,
                   double[::1] dist, long long[::1] hops):
    """Single-source shortest paths on a dense cost matrix.

    Path lengths compare lexicographically as (cost, hops). Fills `dist`
    and `hops` in place and returns the number of edge relaxations
    examined (one per candidate edge out of a settled node).
    """
    cdef Py_ssize_t K = cost.shape[0]
    cdef unsigned char[::1] visited = bytearray(K)
    cdef Py_ssize_t i, v, u, best
    cdef double INF = float("inf")
    cdef double best_d, nd, c
    cdef long long best_h, nh
    cdef long long relaxations = 0

    for i in range(K):
        dist[i] = INF
        hops[i] = 0
        visited[i] = 0
    dist[source] = 0.0

    for i in range(K):
        best = -1
        best_d = INF
        best_h = 0
        for v in range(K):
            if visited[v]:
                continue
            if dist[v] < best_d or (dist[v] == best_d and dist[v] != INF
                                    and hops[v] < best_h):
                best = v
                best_d = dist[v]
                best_h = hops[v]
        if best < 0:
            break
        u = best
        visited[u] = 1
        for v in range(K):
            if visited[v]:
                continue
            relaxations += 1
            c = cost[u, v]
            if c == INF:
                continue
            nd = best_d + c
            nh = best_h + 1
            if nd < dist[v] or (nd == dist[v] and nh < hops[v]):
                dist[v] = nd
                hops[v] = nh
    return relaxations


def levenshtein(long long[::1] a, long long[::1] b):
    """Edit distance between two integer sequences (two-row DP)."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = b.shape[0]
    if n == 0:
        return m
    if m == 0:
        return n
    cdef long long* prev = <long long*> malloc((m + 1) * sizeof(long long))
    cdef long long* cur = <long long*> malloc((m + 1) * sizeof(long long))
    if prev == NULL or cur == NULL:
        free(prev)
        free(cur)
        raise MemoryError()
    cdef Py_ssize_t i, j
    cdef long long ai, sub, dele, ins, best
    cdef long long* tmp
    try:
        for j in range(m + 1):
            prev[j] = j
        for i in range(1, n + 1):
            cur[0] = i
            ai = a[i - 1]
            for j in range(1, m + 1):
                sub = prev[j - 1] + (0 if ai == b[j - 1] else 1)
                dele = prev[j] + 1
                ins = cur[j - 1] + 1
                best = sub if sub < dele else dele
                cur[j] = best if best < ins else ins
            tmp = prev
            prev = cur
            cur = tmp
        return prev[m]
    finally:
        free(prev)
        free(cur)
