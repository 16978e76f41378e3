"""Global minimum cut capacity lambda(G) of an undirected integer-weighted graph.

Three independent routes:

* global_min_cut: Stoer-Wagner maximum-adjacency contraction (numba kernel),
  the fast default used by the Monte Carlo experiment.
* global_min_cut_via_maxflow: fixed source, minimum over all sinks of an
  Edmonds-Karp (BFS Ford-Fulkerson) max flow.
* min_cut_by_enumeration: every bipartition, for oracle-scale graphs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numba
import numpy as np

from .ensemble import GuardExceeded, WeightedGraph

ENUMERATION_MAX_K = 24


@dataclass(frozen=True)
class MinCutResult:
    value: int
    witness: frozenset[int]  # side X of a cut achieving value; not canonical


def cut_weight(g: WeightedGraph, side: frozenset[int] | set[int]) -> int:
    return sum(w for u, v, w in g.edges if (u in side) != (v in side))


@numba.njit(cache=True)
def _stoer_wagner(adj):
    k = adj.shape[0]
    adj = adj.copy()
    active = np.ones(k, dtype=np.bool_)
    owner = np.arange(k)  # super-vertex that absorbed each original vertex
    best = np.iinfo(np.int64).max
    best_side = np.zeros(k, dtype=np.bool_)
    key = np.zeros(k, dtype=np.int64)
    added = np.zeros(k, dtype=np.bool_)
    for phase in range(k - 1):
        key[:] = 0
        added[:] = False
        prev = -1
        last = -1
        last_key = 0
        for _ in range(k - phase):
            sel = -1
            sel_key = -1
            for x in range(k):
                if active[x] and not added[x] and key[x] > sel_key:
                    sel = x
                    sel_key = key[x]
            added[sel] = True
            prev = last
            last = sel
            last_key = sel_key
            for x in range(k):
                if active[x] and not added[x]:
                    key[x] += adj[sel, x]
        if last_key < best:
            best = last_key
            for x in range(k):
                best_side[x] = owner[x] == last
        for x in range(k):
            adj[prev, x] += adj[last, x]
            adj[x, prev] = adj[prev, x]
        adj[prev, prev] = 0
        active[last] = False
        for x in range(k):
            if owner[x] == last:
                owner[x] = prev
    return best, best_side


def global_min_cut(g: WeightedGraph) -> MinCutResult:
    """lambda(G) by Stoer-Wagner; disconnected graphs short-circuit to 0."""
    if g.k < 2:
        raise ValueError("a cut needs at least two vertices")
    comps = g.components()
    if len(comps) > 1:
        return MinCutResult(0, frozenset(comps[0]))
    value, side = _stoer_wagner(g.adjacency_matrix())
    return MinCutResult(int(value), frozenset(int(x) + 1 for x in np.flatnonzero(side)))


def _residual(g: WeightedGraph) -> dict[int, dict[int, int]]:
    cap: dict[int, dict[int, int]] = {x: {} for x in range(1, g.k + 1)}
    for u, v, w in g.edges:
        cap[u][v] = cap[u].get(v, 0) + w
        cap[v][u] = cap[v].get(u, 0) + w
    return cap


def _max_flow_residual(g: WeightedGraph, s: int, t: int) -> tuple[int, dict[int, dict[int, int]]]:
    if s == t:
        raise ValueError("source and sink must differ")
    if not (1 <= s <= g.k and 1 <= t <= g.k):
        raise ValueError(f"terminals must lie in [1,{g.k}]")
    if any(w <= 0 for w in g.weights):
        raise ValueError("max flow requires positive integer capacities")
    res = _residual(g)
    flow = 0
    while True:
        parent = {s: s}
        queue = deque([s])
        while queue and t not in parent:
            x = queue.popleft()
            for y, c in res[x].items():
                if c > 0 and y not in parent:
                    parent[y] = x
                    queue.append(y)
        if t not in parent:
            return flow, res
        push = None
        y = t
        while y != s:
            x = parent[y]
            push = res[x][y] if push is None else min(push, res[x][y])
            y = x
        y = t
        while y != s:
            x = parent[y]
            res[x][y] -= push
            res[y][x] += push
            y = x
        flow += push


def max_flow(g: WeightedGraph, s: int, t: int) -> int:
    """s-t max flow with each undirected edge usable in both directions at capacity w."""
    return _max_flow_residual(g, s, t)[0]


def _reachable(res: dict[int, dict[int, int]], s: int) -> frozenset[int]:
    seen = {s}
    stack = [s]
    while stack:
        x = stack.pop()
        for y, c in res[x].items():
            if c > 0 and y not in seen:
                seen.add(y)
                stack.append(y)
    return frozenset(seen)


def global_min_cut_via_maxflow(g: WeightedGraph) -> MinCutResult:
    """min over t != 1 of maxflow(1, t); witness is the residual-reachable set of 1."""
    if g.k < 2:
        raise ValueError("a cut needs at least two vertices")
    comps = g.components()
    if len(comps) > 1:
        return MinCutResult(0, frozenset(comps[0]))
    best: MinCutResult | None = None
    for t in range(2, g.k + 1):
        value, res = _max_flow_residual(g, 1, t)
        if best is None or value < best.value:
            best = MinCutResult(value, _reachable(res, 1))
    return best


def min_cut_by_enumeration(g: WeightedGraph, max_k: int = ENUMERATION_MAX_K) -> MinCutResult:
    """Brute force over the 2^(k-1) - 1 bipartitions with vertex 1 on side X."""
    if g.k > max_k:
        raise GuardExceeded("min-cut enumeration vertex count", g.k, max_k)
    masks = (np.arange((1 << (g.k - 1)) - 1, dtype=np.int64) << 1) | 1
    values = np.zeros(len(masks), dtype=np.int64)
    for u, v, w in g.edges:
        values += w * (((masks >> (u - 1)) ^ (masks >> (v - 1))) & 1)
    i = int(np.argmin(values))
    mask = int(masks[i])
    return MinCutResult(int(values[i]), frozenset(x + 1 for x in range(g.k) if mask >> x & 1))
