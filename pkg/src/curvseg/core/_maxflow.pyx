# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Dinic max-flow kernel; hot loop of the roof-duality solver.

Mirrors _maxflow_py exactly: identical arc layout, identical results
(max-flow value is unique and the residual source-reachable set is
flow-independent).
"""

from libc.stdlib cimport free, malloc

import numpy as np

BACKEND = "cython"

ctypedef long long i64


cdef struct Graph:
    int num_nodes
    long long num_arcs  # 2 * m
    int *to
    int *fr
    i64 *cap
    long long *start
    long long *adj


cdef int _build(Graph *g, int num_nodes, long long m,
                const long long[::1] tails, const long long[::1] heads,
                const i64[::1] caps) except -1:
    cdef long long a, e
    cdef int u
    g.num_nodes = num_nodes
    g.num_arcs = 2 * m
    g.to = <int *>malloc(2 * m * sizeof(int))
    g.fr = <int *>malloc(2 * m * sizeof(int))
    g.cap = <i64 *>malloc(2 * m * sizeof(i64))
    g.start = <long long *>malloc((num_nodes + 1) * sizeof(long long))
    g.adj = <long long *>malloc(2 * m * sizeof(long long))
    if not (g.to and g.fr and g.cap and g.start and g.adj):
        raise MemoryError()
    for e in range(m):
        g.to[2 * e] = <int>heads[e]
        g.fr[2 * e] = <int>tails[e]
        g.cap[2 * e] = caps[e]
        g.to[2 * e + 1] = <int>tails[e]
        g.fr[2 * e + 1] = <int>heads[e]
        g.cap[2 * e + 1] = 0
    for u in range(num_nodes + 1):
        g.start[u] = 0
    for a in range(2 * m):
        g.start[g.fr[a] + 1] += 1
    for u in range(num_nodes):
        g.start[u + 1] += g.start[u]
    cdef long long *fill = <long long *>malloc(num_nodes * sizeof(long long))
    if not fill:
        raise MemoryError()
    for u in range(num_nodes):
        fill[u] = g.start[u]
    for a in range(2 * m):
        u = g.fr[a]
        g.adj[fill[u]] = a
        fill[u] += 1
    free(fill)
    return 0


cdef void _free_graph(Graph *g) noexcept:
    free(g.to)
    free(g.fr)
    free(g.cap)
    free(g.start)
    free(g.adj)


cdef bint _bfs_levels(Graph *g, int *level, int *queue, int source, int sink) noexcept nogil:
    cdef int u, v, qhead = 0, qtail = 0
    cdef long long pos, a
    for u in range(g.num_nodes):
        level[u] = -1
    level[source] = 0
    queue[qtail] = source
    qtail += 1
    while qhead < qtail:
        u = queue[qhead]
        qhead += 1
        for pos in range(g.start[u], g.start[u + 1]):
            a = g.adj[pos]
            v = g.to[a]
            if g.cap[a] > 0 and level[v] < 0:
                level[v] = level[u] + 1
                queue[qtail] = v
                qtail += 1
    return level[sink] >= 0


cdef i64 _blocking_flow(Graph *g, int *level, long long *it, long long *path,
                        int source, int sink) noexcept nogil:
    cdef i64 total = 0, bottleneck
    cdef int u = source, v
    cdef long long depth = 0, a, idx, cut
    cdef bint advanced
    while True:
        if u == sink:
            bottleneck = g.cap[path[0]]
            for idx in range(1, depth):
                if g.cap[path[idx]] < bottleneck:
                    bottleneck = g.cap[path[idx]]
            cut = depth
            for idx in range(depth):
                a = path[idx]
                g.cap[a] -= bottleneck
                g.cap[a ^ 1] += bottleneck
                if g.cap[a] == 0 and idx < cut:
                    cut = idx
            depth = cut
            total += bottleneck
            u = g.to[path[depth - 1]] if depth > 0 else source
            continue
        advanced = False
        while it[u] < g.start[u + 1]:
            a = g.adj[it[u]]
            v = g.to[a]
            if g.cap[a] > 0 and level[v] == level[u] + 1:
                path[depth] = a
                depth += 1
                u = v
                advanced = True
                break
            it[u] += 1
        if not advanced:
            if u == source:
                break
            level[u] = -1
            depth -= 1
            u = g.fr[path[depth]]
    return total


def maxflow(num_nodes, tails, heads, caps, source, sink):
    """Returns (flow value, uint8 source-reachable array of length num_nodes)."""
    cdef long long[::1] tails_v = np.ascontiguousarray(tails, dtype=np.int64)
    cdef long long[::1] heads_v = np.ascontiguousarray(heads, dtype=np.int64)
    cdef i64[::1] caps_v = np.ascontiguousarray(caps, dtype=np.int64)
    cdef long long m = tails_v.shape[0]
    cdef int n = num_nodes, src = source, snk = sink
    cdef Graph g
    _build(&g, n, m, tails_v, heads_v, caps_v)
    cdef int *level = <int *>malloc(n * sizeof(int))
    cdef int *queue = <int *>malloc(n * sizeof(int))
    cdef long long *it = <long long *>malloc(n * sizeof(long long))
    cdef long long *path = <long long *>malloc((n + 1) * sizeof(long long))
    if not (level and queue and it and path):
        _free_graph(&g)
        raise MemoryError()
    cdef i64 flow = 0
    cdef int u
    try:
        with nogil:
            while _bfs_levels(&g, level, queue, src, snk):
                for u in range(n):
                    it[u] = g.start[u]
                flow += _blocking_flow(&g, level, it, path, src, snk)
        reach = np.zeros(n, dtype=np.uint8)
        _residual_reach(&g, level, queue, src, reach)
        return int(flow), reach
    finally:
        free(level)
        free(queue)
        free(it)
        free(path)
        _free_graph(&g)


cdef void _residual_reach(Graph *g, int *scratch, int *queue, int source,
                          unsigned char[::1] reach) noexcept nogil:
    cdef int u, v, qhead = 0, qtail = 0
    cdef long long pos, a
    reach[source] = 1
    queue[qtail] = source
    qtail += 1
    while qhead < qtail:
        u = queue[qhead]
        qhead += 1
        for pos in range(g.start[u], g.start[u + 1]):
            a = g.adj[pos]
            v = g.to[a]
            if g.cap[a] > 0 and reach[v] == 0:
                reach[v] = 1
                queue[qtail] = v
                qtail += 1
