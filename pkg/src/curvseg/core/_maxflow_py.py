"""Pure-Python Dinic max-flow; reference fallback for the compiled core.

Same arc layout and semantics as the Cython kernel: arcs arrive as
(tail, head, capacity) triples, reverse arcs are created implicitly (arc
2i forward, 2i+1 reverse), and the returned reachability is the BFS tree
from the source in the final residual graph. The reachable set of a max
flow is flow-independent, so both backends agree exactly.
"""

from collections import deque

import numpy as np

BACKEND = "python"


def maxflow(num_nodes, tails, heads, caps, source, sink):
    """Returns (flow value, uint8 source-reachable array of length num_nodes)."""
    m = len(tails)
    to = [0] * (2 * m)
    fr = [0] * (2 * m)
    cap = [0] * (2 * m)
    for e in range(m):
        t, h = int(tails[e]), int(heads[e])
        to[2 * e] = h
        fr[2 * e] = t
        cap[2 * e] = int(caps[e])
        to[2 * e + 1] = t
        fr[2 * e + 1] = h
    # CSR adjacency in arc-id order (deterministic).
    deg = [0] * num_nodes
    for a in range(2 * m):
        deg[fr[a]] += 1
    start = [0] * (num_nodes + 1)
    for u in range(num_nodes):
        start[u + 1] = start[u] + deg[u]
    fill = start[:num_nodes]
    adj = [0] * (2 * m)
    for a in range(2 * m):
        u = fr[a]
        adj[fill[u]] = a
        fill[u] += 1

    level = [-1] * num_nodes
    flow = 0
    while _bfs_levels(num_nodes, start, adj, to, cap, level, source, sink):
        it = start[:num_nodes]
        flow += _blocking_flow(start, adj, to, fr, cap, level, it, source, sink)
    reach = _residual_reach(num_nodes, start, adj, to, cap, source)
    return flow, reach


def _bfs_levels(num_nodes, start, adj, to, cap, level, source, sink):
    for u in range(num_nodes):
        level[u] = -1
    level[source] = 0
    q = deque([source])
    while q:
        u = q.popleft()
        for pos in range(start[u], start[u + 1]):
            a = adj[pos]
            v = to[a]
            if cap[a] > 0 and level[v] < 0:
                level[v] = level[u] + 1
                q.append(v)
    return level[sink] >= 0


def _blocking_flow(start, adj, to, fr, cap, level, it, source, sink):
    total = 0
    path = []  # arc ids from source to current node
    u = source
    while True:
        if u == sink:
            bottleneck = min(cap[a] for a in path)
            for a in path:
                cap[a] -= bottleneck
                cap[a ^ 1] += bottleneck
            total += bottleneck
            # restart from the first saturated arc on the path
            for idx, a in enumerate(path):
                if cap[a] == 0:
                    del path[idx:]
                    break
            u = to[path[-1]] if path else source
            continue
        advanced = False
        while it[u] < start[u + 1]:
            a = adj[it[u]]
            v = to[a]
            if cap[a] > 0 and level[v] == level[u] + 1:
                path.append(a)
                u = v
                advanced = True
                break
            it[u] += 1
        if not advanced:
            if u == source:
                break
            level[u] = -1  # dead end in this phase
            a = path.pop()
            u = fr[a]
    return total


def _residual_reach(num_nodes, start, adj, to, cap, source):
    reach = np.zeros(num_nodes, dtype=np.uint8)
    reach[source] = 1
    q = deque([source])
    while q:
        u = q.popleft()
        for pos in range(start[u], start[u + 1]):
            a = adj[pos]
            v = to[a]
            if cap[a] > 0 and not reach[v]:
                reach[v] = 1
                q.append(v)
    return reach
