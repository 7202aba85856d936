"""Shared instance builders for the test suite."""
from __future__ import annotations

from fractions import Fraction
from itertools import product

from mlst.graph import MlstInstance, WeightedGraph
from mlst.netgen import micro_instance


def cycle_instance(k: int, heavy) -> MlstInstance:
    """(k+1)-cycle v0..vk, unit edges except (v0, vk) = ``heavy``;
    T1 = all vertices, T2 = {v0, vk}."""
    n = k + 1
    edges = [(i, i + 1, 1) for i in range(k)] + [(0, k, Fraction(heavy))]
    g = WeightedGraph.from_edges(n, edges)
    return MlstInstance.create(g, [range(n), {0, k}])


def top_family(k: int, eps=Fraction(1, 2)) -> MlstInstance:
    """Top-down is fooled: the heavy edge k - eps is the cheapest T2 tree."""
    return cycle_instance(k, k - Fraction(eps))


def bot_family(k: int, eps=Fraction(1, 2)) -> MlstInstance:
    """Bottom-up is fooled: the heavy edge 1 + eps is left out of the T1 tree."""
    return cycle_instance(k, 1 + Fraction(eps))


def micro_grid(count: int, ns=(5, 6, 7, 8), ells=(2, 3), tsms=("linear", "exponential"),
               max_edges: int = 10):
    """``count`` seeded micro instances cycling over sizes, levels and TSMs."""
    combos = [(n, ell, tsm) for n, ell, tsm in product(ns, ells, tsms)
              if tsm == "linear" or n >= 2 ** ell]
    out = []
    seed = 0
    while len(out) < count:
        n, ell, tsm = combos[seed % len(combos)]
        out.append(micro_instance(seed, n, ell, tsm, max_edges))
        seed += 1
    return out


def path_graph(costs) -> WeightedGraph:
    return WeightedGraph.from_edges(len(costs) + 1, [(i, i + 1, c) for i, c in enumerate(costs)])


def star_graph(leaves: int = 3) -> WeightedGraph:
    """Center 0, leaves 1..leaves, unit edges."""
    return WeightedGraph.from_edges(leaves + 1, [(0, i, 1) for i in range(1, leaves + 1)])
