"""Threshold graphs and their component structure.

An edge vector x and a threshold p determine the graph whose edge {i, j}
is present iff x_{ij} <= p (closed inequality; ties have probability 0
under the continuous laws but the convention is fixed for determinism).
"""

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .edges import edge_count, edge_pairs


@dataclass(frozen=True)
class ThresholdGraph:
    n: int
    p: float
    edges: np.ndarray  # (m, 2) int array, pairs i < j


@dataclass(frozen=True)
class ComponentStats:
    sizes: tuple           # component orders, descending
    isolated_count: int
    max_component: int
    z_histogram: dict      # order k -> Z_k
    connected: bool


def build_graph(x, n, p):
    """Threshold an edge vector: keep exactly the pairs with x_e <= p."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"threshold p must lie in (0, 1), got {p}")
    x = np.asarray(x)
    d = edge_count(n)
    if x.shape != (d,):
        raise ValueError(f"expected {d} edge values for n={n}, got shape {x.shape}")
    keep = np.nonzero(x <= p)[0]
    return ThresholdGraph(n=n, p=float(p), edges=edge_pairs(n)[keep])


class DisjointSet:
    """Union-find with path compression and union by size."""

    def __init__(self, n):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, v):
        parent = self.parent
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    def union(self, u, v):
        ru, rv = self.find(u), self.find(v)
        if ru == rv:
            return
        if self.size[ru] < self.size[rv]:
            ru, rv = rv, ru
        self.parent[rv] = ru
        self.size[ru] += self.size[rv]


def components(g):
    """Component decomposition of a threshold graph."""
    ds = DisjointSet(g.n)
    for u, v in g.edges.tolist():
        ds.union(u, v)
    sizes = Counter()
    for v in range(g.n):
        sizes[ds.find(v)] += 1
    orders = sorted(sizes.values(), reverse=True)
    hist = Counter(orders)
    return ComponentStats(
        sizes=tuple(orders),
        isolated_count=hist.get(1, 0),
        max_component=orders[0],
        z_histogram=dict(hist),
        connected=orders[0] == g.n,
    )


def small_component_mass(stats, cutoff):
    """Number of vertices on components of order <= cutoff."""
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")
    return sum(k * z for k, z in stats.z_histogram.items() if k <= cutoff)


def components_bfs(g):
    """Brute-force BFS labeling; independent oracle for `components`."""
    adj = [[] for _ in range(g.n)]
    for u, v in g.edges.tolist():
        adj[u].append(v)
        adj[v].append(u)
    seen = [False] * g.n
    orders = []
    for s in range(g.n):
        if seen[s]:
            continue
        stack = [s]
        seen[s] = True
        size = 0
        while stack:
            v = stack.pop()
            size += 1
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        orders.append(size)
    orders.sort(reverse=True)
    hist = Counter(orders)
    return ComponentStats(
        sizes=tuple(orders),
        isolated_count=hist.get(1, 0),
        max_component=orders[0],
        z_histogram=dict(hist),
        connected=orders[0] == g.n,
    )
