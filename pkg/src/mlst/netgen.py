"""Seeded random MLST instances: ER, WS and BA graphs, integer weights 1..10,
linear or exponential nested terminal sets.

Everything draws from one ``random.Random`` stream seeded by ``GenSpec.seed``,
so a spec always yields the same instance file.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .graph import MlstInstance, WeightedGraph

MODELS = ("er", "ws", "ba")
TSMS = ("linear", "exponential")
MAX_RETRIES = 1000


class GenerationError(ValueError):
    pass


@dataclass(frozen=True)
class GenSpec:
    model: str
    n: int
    ell: int
    tsm: str = "linear"
    seed: int = 0
    eps: float = 1.0
    K: int = 6
    beta: float = 0.2
    m0: int = 10
    m: int = 5

    def __post_init__(self):
        if self.model not in MODELS:
            raise GenerationError(f"unknown model {self.model!r}")
        if self.tsm not in TSMS:
            raise GenerationError(f"unknown terminal selection {self.tsm!r}")
        if self.n < 2:
            raise GenerationError("n must be at least 2")
        if self.ell < 1:
            raise GenerationError("ell must be at least 1")
        if not 0 <= self.seed < 2 ** 64:
            raise GenerationError("seed must fit in 64 bits")
        if self.model == "er" and self.eps <= 0:
            raise GenerationError("er needs eps > 0")
        if self.model == "ws":
            _check_ws(self.n, self.K, self.beta)
        if self.model == "ba":
            _check_ba(self.n, self.m0, self.m)


def _check_ws(n, K, beta):
    if K % 2 or not 2 <= K < n:
        raise GenerationError(f"ws needs even K with 2 <= K < n, got K={K}, n={n}")
    if not 0 <= beta <= 1:
        raise GenerationError("ws needs 0 <= beta <= 1")


def _check_ba(n, m0, m):
    if not 1 <= m <= m0 <= n or m0 < 2:
        raise GenerationError(f"ba needs 1 <= m <= m0 <= n and m0 >= 2, got m={m}, m0={m0}, n={n}")


def _unit_graph(n, pairs) -> WeightedGraph:
    return WeightedGraph.from_edges(n, [(u, v, 1) for u, v in sorted(pairs)])


def _retry(make, what):
    for _ in range(MAX_RETRIES):
        g = make()
        if g.is_connected():
            return g
    raise GenerationError(f"{what}: no connected graph after {MAX_RETRIES} attempts")


def er_probability(n: int, eps: float) -> float:
    return min(1.0, (1 + eps) * math.log(n) / n)


def gen_er(n: int, eps: float, rng: random.Random) -> WeightedGraph:
    if n < 2 or eps <= 0:
        raise GenerationError("er needs n >= 2 and eps > 0")
    p = er_probability(n, eps)

    def make():
        return _unit_graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p])

    return _retry(make, "er")


def gen_ws(n: int, K: int, beta: float, rng: random.Random) -> WeightedGraph:
    _check_ws(n, K, beta)

    def make():
        adj = [set() for _ in range(n)]
        for v in range(n):
            for j in range(1, K // 2 + 1):
                w = (v + j) % n
                adj[v].add(w)
                adj[w].add(v)
        # rewire lattice edge (v, v+j) to (v, w) with probability beta
        for j in range(1, K // 2 + 1):
            for v in range(n):
                u = (v + j) % n
                if u not in adj[v] or rng.random() >= beta:
                    continue
                if len(adj[v]) >= n - 1:
                    continue
                w = rng.randrange(n)
                while w == v or w in adj[v]:
                    w = rng.randrange(n)
                adj[v].discard(u)
                adj[u].discard(v)
                adj[v].add(w)
                adj[w].add(v)
        return _unit_graph(n, {(min(a, b), max(a, b)) for a in range(n) for b in adj[a]})

    return _retry(make, "ws")


def gen_ba(n: int, m0: int, m: int, rng: random.Random) -> WeightedGraph:
    """Ring on m0 seed vertices, then each newcomer attaches to m distinct vertices by degree."""
    _check_ba(n, m0, m)
    pairs = {(min(v, (v + 1) % m0), max(v, (v + 1) % m0)) for v in range(m0)}
    deg = [0] * n
    for u, v in pairs:
        deg[u] += 1
        deg[v] += 1
    for new in range(m0, n):
        chosen: list[int] = []
        for _ in range(m):
            cands = [v for v in range(new) if v not in chosen]
            total = sum(deg[v] for v in cands)
            r = rng.random() * total
            pick = cands[-1]
            for v in cands:
                r -= deg[v]
                if r < 0:
                    pick = v
                    break
            chosen.append(pick)
        for v in chosen:
            pairs.add((v, new))
            deg[v] += 1
            deg[new] += 1
    return _unit_graph(n, pairs)


def assign_weights(graph: WeightedGraph, rng: random.Random, low: int = 1, high: int = 10) -> WeightedGraph:
    return WeightedGraph.from_edges(
        graph.vertex_count, [(e.u, e.v, rng.randint(low, high)) for e in graph.edges])


def terminal_sizes(n: int, ell: int, tsm: str) -> list[int]:
    """|T_1|, ..., |T_ell| bottom to top."""
    if tsm == "linear":
        return [n * (ell - i + 1) // (ell + 1) for i in range(1, ell + 1)]
    if tsm == "exponential":
        return [n // 2 ** i for i in range(1, ell + 1)]
    raise GenerationError(f"unknown terminal selection {tsm!r}")


def pick_terminals(graph: WeightedGraph, ell: int, tsm: str, rng: random.Random) -> list[frozenset[int]]:
    sizes = terminal_sizes(graph.vertex_count, ell, tsm)
    if sizes[-1] < 1:
        raise GenerationError(f"top level would be empty (sizes {sizes})")
    pool = list(range(graph.vertex_count))
    out = []
    for k in sizes:
        pool = sorted(rng.sample(pool, k))
        out.append(frozenset(pool))
    return out


def generate_instance(spec: GenSpec) -> MlstInstance:
    rng = random.Random(spec.seed)
    if spec.model == "er":
        g = gen_er(spec.n, spec.eps, rng)
    elif spec.model == "ws":
        g = gen_ws(spec.n, spec.K, spec.beta, rng)
    else:
        g = gen_ba(spec.n, spec.m0, spec.m, rng)
    g = assign_weights(g, rng)
    return MlstInstance.create(g, pick_terminals(g, spec.ell, spec.tsm, rng))


def micro_instance(seed: int, n: int, ell: int, tsm: str = "linear", max_edges: int = 10) -> MlstInstance:
    """Small connected instance for oracle checks: a random spanning tree plus
    random extra edges up to ``max_edges``, weights 1..10."""
    if n < 2 or max_edges < n - 1:
        raise GenerationError("micro instance needs n >= 2 and max_edges >= n - 1")
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    pairs = set()
    for k in range(1, n):
        u, v = order[k], order[rng.randrange(k)]
        pairs.add((min(u, v), max(u, v)))
    rest = [(u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in pairs]
    extra = rng.randint(0, min(len(rest), max_edges - (n - 1)))
    pairs.update(rng.sample(rest, extra))
    g = assign_weights(_unit_graph(n, pairs), rng)
    return MlstInstance.create(g, pick_terminals(g, ell, tsm, rng))
