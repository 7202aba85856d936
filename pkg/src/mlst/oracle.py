"""Brute-force ground truth for micro instances.

``oracle_steiner`` scans every edge subset. ``oracle_mlst`` computes the best
nested family E_l <= ... <= E_1 with a subset-minimum sweep over edge masks,
which visits the same families as the nested enumeration but shares work
between them.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable

import numpy as np

from .graph import MlstInstance, MlstSolution, WeightedGraph, solution_cost, weighted_level_cost

STEINER_EDGE_LIMIT = 16
MLST_EDGE_LIMIT = 10
MLST_LEVEL_LIMIT = 3

_INF = np.iinfo(np.int64).max // 4


class OracleGuardError(ValueError):
    pass


@dataclass(frozen=True)
class OracleSteiner:
    cost: Fraction
    edges: frozenset[int]


@dataclass(frozen=True)
class OracleMlst:
    cost: Fraction
    solution: MlstSolution
    level_opt: tuple[Fraction, ...]     # OPT_i: cost of edges whose top level is i
    mins: tuple[Fraction, ...]          # MIN_i


def _scaled(graph: WeightedGraph) -> tuple[np.ndarray, int]:
    den = 1
    for e in graph.edges:
        den = lcm(den, e.cost.denominator)
    return np.array([int(e.cost * den) for e in graph.edges], dtype=np.int64), den


def _mask_costs(w: np.ndarray) -> np.ndarray:
    cost = np.zeros(1, dtype=np.int64)
    for c in w:
        cost = np.concatenate([cost, cost + c])
    return cost


def _connects_all(graph: WeightedGraph, terminals: Iterable[int]) -> np.ndarray:
    """Boolean table over edge masks: does the mask connect ``terminals``?"""
    ts = sorted(terminals)
    m = graph.edge_count
    out = np.zeros(1 << m, dtype=bool)
    if len(ts) <= 1:
        out[:] = True
        return out
    ends = [(e.u, e.v) for e in graph.edges]
    for mask in range(1 << m):
        parent = list(range(graph.vertex_count))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        bits = mask
        k = 0
        while bits:
            if bits & 1:
                a, b = find(ends[k][0]), find(ends[k][1])
                if a != b:
                    parent[a] = b
            bits >>= 1
            k += 1
        root = find(ts[0])
        out[mask] = all(find(t) == root for t in ts[1:])
    return out


def _edges_of(mask: int) -> frozenset[int]:
    return frozenset(k for k in range(mask.bit_length()) if mask >> k & 1)


def _lex_key(mask: int) -> tuple[int, ...]:
    return tuple(sorted(_edges_of(mask)))


def oracle_steiner(graph: WeightedGraph, terminals: Iterable[int],
                   edge_limit: int = STEINER_EDGE_LIMIT) -> OracleSteiner:
    """Cheapest edge subset connecting ``terminals``; ties go to the lexicographically smallest."""
    ts = frozenset(terminals)
    if graph.edge_count > edge_limit:
        raise OracleGuardError(f"oracle_steiner needs |E| <= {edge_limit}, got {graph.edge_count}")
    if len(ts) <= 1:
        return OracleSteiner(Fraction(0), frozenset())
    w, den = _scaled(graph)
    cost = _mask_costs(w)
    ok = _connects_all(graph, ts)
    if not ok.any():
        raise ValueError("terminals are not connected in the graph")
    best = cost[ok].min()
    masks = np.nonzero(ok & (cost == best))[0]
    winner = min((int(x) for x in masks), key=_lex_key)
    return OracleSteiner(Fraction(int(best), den), _edges_of(winner))


def _subset_min(g: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    """h[S] = min over S' <= S of g[S'], with the arg-min mask."""
    h = g.copy()
    arg = np.arange(len(g), dtype=np.int64)
    idx = np.arange(len(g), dtype=np.int64)
    for k in range(m):
        bit = 1 << k
        has = (idx & bit) != 0
        src = idx[has] ^ bit
        better = h[src] < h[has]
        tgt = idx[has][better]
        h[tgt] = h[src[better]]
        arg[tgt] = arg[src[better]]
    return h, arg


def oracle_mlst(instance: MlstInstance, edge_limit: int = MLST_EDGE_LIMIT,
                level_limit: int = MLST_LEVEL_LIMIT) -> OracleMlst:
    """Exact MLST optimum by exhaustive search over nested edge-set families."""
    g = instance.graph
    ell = instance.levels
    m = g.edge_count
    if m > edge_limit or ell > level_limit:
        raise OracleGuardError(
            f"oracle_mlst needs |E| <= {edge_limit} and ell <= {level_limit}, got |E|={m}, ell={ell}")
    w, den = _scaled(g)
    cost = _mask_costs(w)
    conn = [_connects_all(g, instance.level_terminals(i)) for i in range(1, ell + 1)]

    # g_i[S] = c(S) + best nested family above S, when S connects T_i
    h_above = np.zeros(1 << m, dtype=np.int64)
    args = []
    for i in range(ell, 0, -1):
        gi = np.where(conn[i - 1], cost + h_above, _INF)
        h_above, arg = _subset_min(gi, m)
        args.append(arg)
    args.reverse()
    total = int(h_above[(1 << m) - 1])
    if total >= _INF:
        raise ValueError("no feasible nested family")

    masks = []
    cur = (1 << m) - 1
    for i in range(ell):
        cur = int(args[i][cur])
        masks.append(cur)
    sol = MlstSolution.from_levels([_edges_of(x) for x in masks])
    opt = Fraction(total, den)

    level_opt = []
    for i in range(ell):
        above = masks[i + 1] if i + 1 < ell else 0
        level_opt.append(Fraction(int(cost[masks[i] & ~above]), den))
    mins = tuple(Fraction(int(cost[c].min()), den) for c in conn)

    # decomposition and lower-bound checks on every run
    assert solution_cost(instance, sol) == opt
    assert weighted_level_cost(instance, sol) == opt
    assert sum((i + 1) * v for i, v in enumerate(level_opt)) == opt
    assert opt >= sum(mins)
    return OracleMlst(opt, sol, tuple(level_opt), mins)
