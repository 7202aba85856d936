"""Single-level Steiner tree subroutines and tree surgery.

All routines accept a :class:`WeightOverlay` whose edges cost zero; this is
how the top-down pass reuses edges already bought on higher levels.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .graph import WeightedGraph

APPROX2 = "approx2"
EXACT = "exact"
MODES = (APPROX2, EXACT)

EXACT_TERMINAL_LIMIT = 14


class GraphNotConnectedError(ValueError):
    pass


class TerminalLimitError(ValueError):
    pass


@dataclass(frozen=True)
class WeightOverlay:
    zeroed: frozenset[int] = frozenset()

    def cost(self, graph: WeightedGraph, eid: int) -> Fraction:
        return Fraction(0) if eid in self.zeroed else graph.edges[eid].cost


NO_OVERLAY = WeightOverlay()


@dataclass(frozen=True)
class SteinerResult:
    edges: frozenset[int]
    cost: Fraction
    mode: str


def effective_costs(graph: WeightedGraph, overlay: WeightOverlay | None) -> list[Fraction]:
    zeroed = overlay.zeroed if overlay else frozenset()
    return [Fraction(0) if eid in zeroed else e.cost for eid, e in enumerate(graph.edges)]


def _scaled(costs: list[Fraction]) -> tuple[list[int], int]:
    """Costs times the lcm of their denominators, and that lcm."""
    scale = 1
    for c in costs:
        scale = scale * c.denominator // math.gcd(scale, c.denominator)
    return [int(c * scale) for c in costs], scale


def dijkstra(graph: WeightedGraph, source: int, costs) -> tuple[list, list[int]]:
    """Shortest distances from ``source`` and the predecessor edge of each vertex.

    Among equal-length paths the one through the smaller predecessor vertex id wins.
    Unreachable vertices get distance ``None``.
    """
    n = graph.vertex_count
    dist = [None] * n
    pred_v = [-1] * n
    pred_e = [-1] * n
    done = [False] * n
    dist[source] = costs[0] * 0 if costs else 0
    heap = [(dist[source], source)]
    adj = graph.adjacency
    while heap:
        d, u = heapq.heappop(heap)
        if done[u] or d != dist[u]:
            continue
        done[u] = True
        for w, eid in adj[u]:
            if done[w]:
                continue
            nd = d + costs[eid]
            if dist[w] is None or nd < dist[w] or (nd == dist[w] and u < pred_v[w]):
                improved = dist[w] is None or nd < dist[w]
                dist[w] = nd
                pred_v[w] = u
                pred_e[w] = eid
                if improved:
                    heapq.heappush(heap, (nd, w))
    return dist, pred_e


def _walk_back(graph: WeightedGraph, pred_e: list[int], target: int) -> list[int]:
    path = []
    v = target
    while pred_e[v] != -1:
        eid = pred_e[v]
        path.append(eid)
        v = graph.edges[eid].other(v)
    path.reverse()
    return path


@dataclass(frozen=True)
class MetricClosure:
    terminals: tuple[int, ...]
    distance: dict[tuple[int, int], Fraction]
    path: dict[tuple[int, int], tuple[int, ...]]

    def d(self, u: int, v: int) -> Fraction:
        return Fraction(0) if u == v else self.distance[(min(u, v), max(u, v))]


def metric_closure(graph: WeightedGraph, terminals: Iterable[int],
                   overlay: WeightOverlay | None = None) -> MetricClosure:
    """Complete graph on ``terminals`` with shortest-path distances and witness paths."""
    ts = tuple(sorted(set(terminals)))
    if not ts:
        raise ValueError("terminal set is empty")
    # integer arithmetic inside the searches, exact fractions outside
    ints, scale = _scaled(effective_costs(graph, overlay))
    distance, path = {}, {}
    for i, a in enumerate(ts[:-1]):
        dist, pred_e = dijkstra(graph, a, ints)
        for b in ts[i + 1:]:
            if dist[b] is None:
                raise GraphNotConnectedError("graph not connected")
            distance[(a, b)] = Fraction(dist[b], scale)
            path[(a, b)] = tuple(_walk_back(graph, pred_e, b))
    return MetricClosure(ts, distance, path)


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def is_tree(graph: WeightedGraph, edges: Iterable[int]) -> bool:
    """Acyclic and connected on its own vertex set (the empty set counts)."""
    es = list(edges)
    uf = _UnionFind()
    for eid in es:
        e = graph.edges[eid]
        if not uf.union(e.u, e.v):
            return False
    return len({uf.find(v) for v in graph.endpoints(es)}) <= 1


def prune(graph: WeightedGraph, tree: Iterable[int], keep_terminals: Iterable[int],
          forced: Iterable[int] = ()) -> frozenset[int]:
    """Minimal subtree of ``tree`` spanning ``keep_terminals`` and the forced edges.

    Degree-1 vertices that are neither kept terminals nor forced-edge endpoints
    are peeled repeatedly.
    """
    tree = set(tree)
    forced = set(forced)
    keep = set(keep_terminals) | graph.endpoints(forced)
    if not forced <= tree:
        raise ValueError("forced edges must belong to the tree")
    if not is_tree(graph, tree):
        raise ValueError("input edge set is not a tree")
    verts = graph.endpoints(tree)
    if tree and not keep <= verts:
        raise ValueError("kept vertices must lie on the tree")
    if not tree and len(keep) > 1:
        raise ValueError("empty tree cannot span several vertices")
    incident: dict[int, set[int]] = {v: set() for v in verts}
    for eid in tree:
        e = graph.edges[eid]
        incident[e.u].add(eid)
        incident[e.v].add(eid)
    stack = [v for v in sorted(verts) if len(incident[v]) == 1 and v not in keep]
    while stack:
        v = stack.pop()
        if v in keep or len(incident[v]) != 1:
            continue
        (eid,) = incident[v]
        incident[v].clear()
        tree.discard(eid)
        w = graph.edges[eid].other(v)
        incident[w].discard(eid)
        if len(incident[w]) == 1 and w not in keep:
            stack.append(w)
    return frozenset(tree)


def force_tree(graph: WeightedGraph, edges: Iterable[int], forced: Iterable[int] = (),
               overlay: WeightOverlay | None = None) -> frozenset[int]:
    """Spanning tree of the subgraph ``edges`` that keeps every forced edge.

    Cycles are broken by dropping the most expensive non-forced edge (effective
    cost); among equally expensive edges the larger id is dropped first, so the
    kept set is the lexicographically smallest.
    """
    edges = set(edges)
    forced = set(forced)
    if not forced <= edges:
        raise ValueError("forced edges must be a subset of edges")
    uf = _UnionFind()
    kept = set()
    for eid in sorted(forced):
        e = graph.edges[eid]
        if not uf.union(e.u, e.v):
            raise ValueError("forced edges contain a cycle")
        kept.add(eid)
    costs = effective_costs(graph, overlay)
    for eid in sorted(edges - forced, key=lambda x: (costs[x], x)):
        e = graph.edges[eid]
        if uf.union(e.u, e.v):
            kept.add(eid)
    if len({uf.find(v) for v in graph.endpoints(edges)}) > 1:
        raise ValueError("edge set is not connected")
    return frozenset(kept)


def _clean(graph, edges, terminals, overlay) -> frozenset[int]:
    return prune(graph, force_tree(graph, edges, (), overlay), terminals)


def _result(graph, edges, overlay, mode) -> SteinerResult:
    costs = effective_costs(graph, overlay)
    return SteinerResult(frozenset(edges), sum((costs[e] for e in edges), Fraction(0)), mode)


def steiner_2approx(graph: WeightedGraph, terminals: Iterable[int],
                    overlay: WeightOverlay | None = None) -> SteinerResult:
    """Metric-closure MST expanded to real paths, then de-cycled and pruned."""
    closure = metric_closure(graph, terminals, overlay)
    ts = closure.terminals
    if len(ts) == 1:
        return SteinerResult(frozenset(), Fraction(0), APPROX2)
    pairs = sorted(closure.distance, key=lambda p: (closure.distance[p], p))
    uf = _UnionFind()
    union: set[int] = set()
    for a, b in pairs:
        if uf.union(a, b):
            union.update(closure.path[(a, b)])
    return _result(graph, _clean(graph, union, ts, overlay), overlay, APPROX2)


def _integer_costs(costs: list[Fraction]) -> tuple[list[int], int]:
    ints, scale = _scaled(costs)
    if sum(ints) >= 2 ** 61:
        raise OverflowError("edge costs too large for exact integer dynamic programming")
    return ints, scale


def _spanning_tree_all(graph, costs_overlay) -> frozenset[int]:
    return force_tree(graph, range(graph.edge_count), (), costs_overlay)


def steiner_exact(graph: WeightedGraph, terminals: Iterable[int],
                  overlay: WeightOverlay | None = None,
                  terminal_limit: int = EXACT_TERMINAL_LIMIT) -> SteinerResult:
    """Minimum Steiner tree by dynamic programming over terminal subsets.

    Two terminals reduce to a shortest path and the all-vertex case to a
    minimum spanning tree; both are exact and skip the terminal limit.
    """
    ts = sorted(set(terminals))
    if not ts:
        raise ValueError("terminal set is empty")
    if len(ts) == 1:
        return SteinerResult(frozenset(), Fraction(0), EXACT)
    if not graph.is_connected():
        raise GraphNotConnectedError("graph not connected")
    if len(ts) == graph.vertex_count:
        return _result(graph, _spanning_tree_all(graph, overlay), overlay, EXACT)
    costs = effective_costs(graph, overlay)
    if len(ts) == 2:
        _, pred_e = dijkstra(graph, ts[0], _scaled(costs)[0])
        path = _walk_back(graph, pred_e, ts[1])
        return _result(graph, path, overlay, EXACT)
    if len(ts) > terminal_limit:
        raise TerminalLimitError(
            f"exact mode terminal limit: {len(ts)} terminals > {terminal_limit}")
    ints, _ = _integer_costs(costs)
    edges = _dreyfus_wagner(graph, ts, ints)
    return _result(graph, _clean(graph, edges, ts, overlay), overlay, EXACT)


def _dreyfus_wagner(graph: WeightedGraph, ts: list[int], ints: list[int]) -> set[int]:
    n = graph.vertex_count
    k = len(ts) - 1
    base, root = ts[:-1], ts[-1]
    full = (1 << k) - 1
    inf = np.int64(2 ** 62)
    dp = np.full((full + 1, n), inf, dtype=np.int64)
    split = np.zeros((full + 1, n), dtype=np.int64)
    pred = np.full((full + 1, n), -1, dtype=np.int64)
    adj = graph.adjacency
    edges = graph.edges

    for i, t in enumerate(base):
        dist, pred_e = dijkstra(graph, t, ints)
        dp[1 << i] = dist
        pred[1 << i] = pred_e

    for mask in range(1, full + 1):
        if mask & (mask - 1) == 0:
            continue
        # proper submasks holding the lowest bit, largest first (it wins ties)
        low = mask & -mask
        subs = np.zeros(1, dtype=np.int64)
        rest = mask ^ low
        while rest:
            b = rest & -rest
            subs = np.concatenate([subs, subs | b])
            rest ^= b
        subs = np.sort(subs[:-1] | low)[::-1]
        vals = dp[subs] + dp[mask ^ subs]
        pick = vals.argmin(axis=0)
        best = vals[pick, np.arange(n)]
        arg = subs[pick]
        # relax along graph edges from the merged labels
        label = best.tolist()
        pe = [-1] * n
        heap = [(label[v], v) for v in range(n) if label[v] < inf]
        heapq.heapify(heap)
        done = [False] * n
        while heap:
            d, u = heapq.heappop(heap)
            if done[u] or d != label[u]:
                continue
            done[u] = True
            for w, eid in adj[u]:
                nd = d + ints[eid]
                if not done[w] and nd < label[w]:
                    label[w] = nd
                    pe[w] = eid
                    heapq.heappush(heap, (nd, w))
        dp[mask] = label
        split[mask] = arg
        pred[mask] = pe

    out: set[int] = set()
    stack = [(full, root)]
    while stack:
        mask, v = stack.pop()
        while pred[mask, v] != -1:
            eid = int(pred[mask, v])
            out.add(eid)
            v = edges[eid].other(v)
        if mask & (mask - 1):
            sub = int(split[mask, v])
            stack.append((sub, v))
            stack.append((mask ^ sub, v))
    return out


def steiner_tree(graph: WeightedGraph, terminals: Iterable[int],
                 overlay: WeightOverlay | None = None, mode: str = APPROX2) -> SteinerResult:
    if mode == APPROX2:
        return steiner_2approx(graph, terminals, overlay)
    if mode == EXACT:
        return steiner_exact(graph, terminals, overlay)
    raise ValueError(f"unknown mode {mode!r}")
