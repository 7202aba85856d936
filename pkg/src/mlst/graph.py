"""Graph, instance and solution data model for multi-level Steiner trees.

Levels are numbered 1 (bottom, largest terminal set) to ``ell`` (top).
Internally the per-level tuples are 0-based, so ``terminals[0]`` is T_1.
Edge ids are positions in ``WeightedGraph.edges``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence


class InvalidInstanceError(ValueError):
    """Raised when an instance or solution violates its invariants."""


def as_cost(value) -> Fraction:
    """Convert an int, decimal string or Fraction to an exact cost."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # repr gives the shortest decimal that round-trips
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    cost: Fraction

    def other(self, w: int) -> int:
        return self.v if w == self.u else self.u


@dataclass(frozen=True)
class WeightedGraph:
    vertex_count: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if self.vertex_count < 1:
            raise InvalidInstanceError("vertex_count must be positive")
        seen = set()
        for eid, e in enumerate(self.edges):
            if e.u == e.v:
                raise InvalidInstanceError(f"edge {eid}: self-loop at {e.u}")
            if not (0 <= e.u < self.vertex_count and 0 <= e.v < self.vertex_count):
                raise InvalidInstanceError(f"edge {eid}: vertex out of range")
            if e.cost <= 0:
                raise InvalidInstanceError(f"edge {eid}: cost must be positive")
            key = (min(e.u, e.v), max(e.u, e.v))
            if key in seen:
                raise InvalidInstanceError(f"edge {eid}: duplicate edge {key}")
            seen.add(key)

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[tuple]) -> "WeightedGraph":
        return cls(vertex_count, tuple(Edge(int(u), int(v), as_cost(w)) for u, v, w in edges))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def cost(self, eid: int) -> Fraction:
        return self.edges[eid].cost

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per vertex, sorted ``(neighbor, edge_id)`` pairs."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.vertex_count)]
        for eid, e in enumerate(self.edges):
            adj[e.u].append((e.v, eid))
            adj[e.v].append((e.u, eid))
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        idx = {}
        for eid, e in enumerate(self.edges):
            idx[(e.u, e.v)] = eid
            idx[(e.v, e.u)] = eid
        return idx

    def edge_id(self, u: int, v: int) -> int:
        return self.edge_index[(u, v)]

    def is_connected(self) -> bool:
        return len(reachable(self, 0, range(self.edge_count))) == self.vertex_count

    def edge_set_cost(self, edge_ids: Iterable[int]) -> Fraction:
        return sum((self.edges[e].cost for e in edge_ids), Fraction(0))

    def endpoints(self, edge_ids: Iterable[int]) -> set[int]:
        out = set()
        for eid in edge_ids:
            e = self.edges[eid]
            out.add(e.u)
            out.add(e.v)
        return out


def reachable(graph: WeightedGraph, start: int, edge_ids: Iterable[int]) -> set[int]:
    """Vertices reachable from ``start`` using only ``edge_ids``."""
    allowed = set(edge_ids)
    seen = {start}
    queue = deque([start])
    while queue:
        w = queue.popleft()
        for nb, eid in graph.adjacency[w]:
            if eid in allowed and nb not in seen:
                seen.add(nb)
                queue.append(nb)
    return seen


def connects(graph: WeightedGraph, edge_ids: Iterable[int], vertices: Iterable[int]) -> bool:
    """True if all ``vertices`` lie in one component of the subgraph ``edge_ids``."""
    vs = list(vertices)
    if len(vs) <= 1:
        return True
    comp = reachable(graph, vs[0], edge_ids)
    return all(v in comp for v in vs)


@dataclass(frozen=True)
class MlstInstance:
    """A graph plus nested terminal sets; ``terminals[0]`` is the bottom level T_1."""

    graph: WeightedGraph
    terminals: tuple[frozenset[int], ...]

    @classmethod
    def create(cls, graph: WeightedGraph, terminals: Sequence[Iterable[int]],
               validate: bool = True) -> "MlstInstance":
        inst = cls(graph, tuple(frozenset(int(v) for v in t) for t in terminals))
        if validate:
            report = validate_instance(inst)
            if not report.ok:
                raise InvalidInstanceError("; ".join(report.violations))
        return inst

    @property
    def levels(self) -> int:
        return len(self.terminals)

    def level_terminals(self, i: int) -> frozenset[int]:
        """Terminal set T_i for 1-based level ``i``."""
        return self.terminals[i - 1]

    def vertex_level(self, v: int) -> int:
        """Highest level at which ``v`` is a terminal, 0 if it never is."""
        lv = 0
        for i, t in enumerate(self.terminals, start=1):
            if v in t:
                lv = i
        return lv


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate_instance(instance: MlstInstance) -> ValidationReport:
    """Check levels, vertex ranges, nesting and connectivity.

    Violations are returned as data. Nesting is checked as T_{i+1} ⊆ T_i;
    equal consecutive levels are accepted.
    """
    problems = []
    g = instance.graph
    if instance.levels < 1:
        problems.append("instance needs at least one level")
    for i, t in enumerate(instance.terminals, start=1):
        if not t:
            problems.append(f"level {i}: empty terminal set")
        for v in sorted(t):
            if not 0 <= v < g.vertex_count:
                problems.append(f"level {i}: vertex out of range ({v})")
    for i in range(1, instance.levels):
        upper, lower = instance.terminals[i], instance.terminals[i - 1]
        extra = sorted(upper - lower)
        if extra:
            problems.append(f"nesting T{i + 1} ⊄ T{i} (extra vertices {extra})")
    if not g.is_connected():
        problems.append("graph not connected")
    return ValidationReport(tuple(problems))


@dataclass(frozen=True)
class MlstSolution:
    """Nested edge sets; ``edge_sets[0]`` is E_1."""

    edge_sets: tuple[frozenset[int], ...]

    @classmethod
    def from_levels(cls, edge_sets: Sequence[Iterable[int]]) -> "MlstSolution":
        return cls(tuple(frozenset(s) for s in edge_sets))

    @property
    def levels(self) -> int:
        return len(self.edge_sets)

    def level_edges(self, i: int) -> frozenset[int]:
        return self.edge_sets[i - 1]

    def is_nested(self) -> bool:
        return all(self.edge_sets[i] <= self.edge_sets[i - 1] for i in range(1, self.levels))


def check_solution(instance: MlstInstance, sol: MlstSolution) -> list[str]:
    """Return the list of invariant violations of ``sol`` against ``instance``."""
    problems = []
    if sol.levels != instance.levels:
        problems.append(f"solution has {sol.levels} levels, instance has {instance.levels}")
        return problems
    for i in range(1, sol.levels):
        extra = sol.edge_sets[i] - sol.edge_sets[i - 1]
        if extra:
            problems.append(f"nesting E{i + 1} ⊄ E{i} (edges {sorted(extra)})")
    m = instance.graph.edge_count
    for i, es in enumerate(sol.edge_sets, start=1):
        bad = [e for e in es if not 0 <= e < m]
        if bad:
            problems.append(f"level {i}: unknown edge ids {sorted(bad)}")
        elif not connects(instance.graph, es, instance.terminals[i - 1]):
            problems.append(f"level {i}: edges do not connect T{i}")
    return problems


def edge_level_map(sol: MlstSolution) -> dict[int, int]:
    """Map each edge of E_1 to the highest level containing it.

    Edges missing from the map have level 0.
    """
    level_of: dict[int, int] = {}
    for i, es in enumerate(sol.edge_sets, start=1):
        for e in es:
            level_of[e] = i
    return level_of


def solution_cost(instance: MlstInstance, sol: MlstSolution) -> Fraction:
    problems = check_solution(instance, sol)
    if problems:
        raise InvalidInstanceError("; ".join(problems))
    g = instance.graph
    return sum((g.edge_set_cost(es) for es in sol.edge_sets), Fraction(0))


def weighted_level_cost(instance: MlstInstance, sol: MlstSolution) -> Fraction:
    """Cost as sum of L(e) * c(e), the second route to :func:`solution_cost`."""
    g = instance.graph
    return sum((lv * g.cost(e) for e, lv in edge_level_map(sol).items()), Fraction(0))


def level_increments(instance: MlstInstance, sol: MlstSolution) -> list[Fraction]:
    """Costs c(E_i minus E_{i+1}) for i = 1..ell, so total = sum of i * inc_i."""
    g = instance.graph
    out = []
    for i in range(sol.levels):
        above = sol.edge_sets[i + 1] if i + 1 < sol.levels else frozenset()
        out.append(g.edge_set_cost(sol.edge_sets[i] - above))
    return out
