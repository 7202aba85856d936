"""Top-down, bottom-up and composite MLST heuristics.

Every heuristic counts its calls to the single-level Steiner subroutine in
``HeuristicRun.stp_calls``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .graph import MlstInstance, MlstSolution, solution_cost
from .steiner import APPROX2, WeightOverlay, force_tree, prune, steiner_tree

COMPOSITE_LEVEL_LIMIT = 16


class LevelLimitError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class LevelSubset:
    """Sorted subset of levels {1..ell} that always contains level 1."""

    levels: tuple[int, ...]
    ell: int

    def __post_init__(self):
        lv = self.levels
        if not lv or lv[0] != 1:
            raise ValueError(f"level subset must contain 1: {lv}")
        if any(a >= b for a, b in zip(lv, lv[1:])):
            raise ValueError(f"level subset must be strictly increasing: {lv}")
        if lv[-1] > self.ell:
            raise ValueError(f"level {lv[-1]} exceeds ell={self.ell}")

    @classmethod
    def of(cls, levels: Iterable[int], ell: int) -> "LevelSubset":
        return cls(tuple(sorted(set(levels))), ell)

    @classmethod
    def all_for(cls, ell: int) -> list["LevelSubset"]:
        """All 2^(ell-1) subsets in the binary-counting order {1}, {1,2}, {1,3}, {1,2,3}, ..."""
        out = []
        for r in range(1 << (ell - 1)):
            out.append(cls((1,) + tuple(j for j in range(2, ell + 1) if r >> (j - 2) & 1), ell))
        return out

    def coefficients(self) -> list[int]:
        """Length-ell vector with (i_{k+1} - 1) at position i_k, using i_{m+1} = ell + 1."""
        coef = [0] * self.ell
        nxt = self.levels[1:] + (self.ell + 1,)
        for i, j in zip(self.levels, nxt):
            coef[i - 1] = j - 1
        return coef

    def __len__(self):
        return len(self.levels)

    def __contains__(self, i):
        return i in self.levels

    def __str__(self):
        return "{" + ",".join(map(str, self.levels)) + "}"


@dataclass(frozen=True)
class HeuristicRun:
    solution: MlstSolution
    cost: Fraction
    stp_calls: int
    subset_used: LevelSubset | None
    subroutine_mode: str


def _finish(instance, edge_sets, calls, subset, mode) -> HeuristicRun:
    sol = MlstSolution.from_levels(edge_sets)
    return HeuristicRun(sol, solution_cost(instance, sol), calls, subset, mode)


def bottom_up(instance: MlstInstance, mode: str = APPROX2) -> HeuristicRun:
    """One Steiner tree on T_1, pruned to the minimal subtree at every higher level."""
    g = instance.graph
    e1 = steiner_tree(g, instance.level_terminals(1), None, mode).edges
    sets = [e1] + [prune(g, e1, instance.level_terminals(i)) for i in range(2, instance.levels + 1)]
    return _finish(instance, sets, 1, None, mode)


def top_down(instance: MlstInstance, mode: str = APPROX2) -> HeuristicRun:
    g = instance.graph
    ell = instance.levels
    sets: list[frozenset[int]] = [frozenset()] * ell
    above: frozenset[int] = frozenset()
    for i in range(ell, 0, -1):
        terms = instance.level_terminals(i)
        st = steiner_tree(g, terms, WeightOverlay(above), mode).edges
        tree = force_tree(g, st | above, above, WeightOverlay(above))
        sets[i - 1] = prune(g, tree, terms, above)
        above = sets[i - 1]
    return _finish(instance, sets, ell, None, mode)


def composite_on_q(instance: MlstInstance, q: LevelSubset, mode: str = APPROX2) -> HeuristicRun:
    """Steiner trees on the levels of ``q`` (top-down between them), pruning in between."""
    g = instance.graph
    ell = instance.levels
    if q.ell != ell:
        raise ValueError(f"subset built for ell={q.ell}, instance has {ell} levels")
    sets: list[frozenset[int]] = [frozenset()] * ell
    bounds = q.levels + (ell + 1,)
    forced: frozenset[int] = frozenset()
    for k in range(len(q.levels) - 1, -1, -1):
        lo, hi = bounds[k], bounds[k + 1]
        terms = instance.level_terminals(lo)
        overlay = WeightOverlay(forced)
        st = steiner_tree(g, terms, overlay, mode).edges
        tree = prune(g, force_tree(g, st | forced, forced, overlay), terms, forced)
        sets[lo - 1] = tree
        for j in range(lo + 1, hi):
            sets[j - 1] = prune(g, tree, instance.level_terminals(j), forced)
        forced = tree
    return _finish(instance, sets, len(q.levels), q, mode)


def composite_full(instance: MlstInstance, mode: str = APPROX2,
                   level_limit: int = COMPOSITE_LEVEL_LIMIT) -> HeuristicRun:
    """Best of composite_on_q over all 2^(ell-1) subsets.

    Ties go to the lexicographically smallest subset. ``stp_calls`` is the
    total over all runs.
    """
    ell = instance.levels
    if ell > level_limit:
        raise LevelLimitError(
            f"composite over 2^{ell - 1} subsets exceeds level limit {level_limit}; "
            "use guaranteed_composite instead")
    best = None
    calls = 0
    for q in sorted(LevelSubset.all_for(ell), key=lambda s: s.levels):
        run = composite_on_q(instance, q, mode)
        calls += run.stp_calls
        if best is None or run.cost < best.cost:
            best = run
    return HeuristicRun(best.solution, best.cost, calls, best.subset_used, mode)


def level_minimums(instance: MlstInstance, mode: str = APPROX2) -> list[Fraction]:
    """MIN_i: independent Steiner tree cost on each level under original weights."""
    g = instance.graph
    return [steiner_tree(g, instance.level_terminals(i), None, mode).cost
            for i in range(1, instance.levels + 1)]


def guaranteed_composite(instance: MlstInstance, mode: str = APPROX2) -> HeuristicRun:
    """Composite on the subset Q* chosen from the MIN_i vector; at most 2*ell Steiner calls."""
    from .ratio import select_q_star

    mins = level_minimums(instance, mode)
    q_star = select_q_star(mins)
    run = composite_on_q(instance, q_star, mode)
    return HeuristicRun(run.solution, run.cost, instance.levels + run.stp_calls, q_star, mode)


ALGORITHMS = {
    "bu": bottom_up,
    "td": top_down,
    "cmp": composite_full,
    "cmps": guaranteed_composite,
}
