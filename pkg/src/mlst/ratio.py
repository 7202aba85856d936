"""Approximation ratio of the composite heuristic.

For a level subset Q = {i_1 < ... < i_m} the composite run costs at most
sum_k (i_{k+1} - 1) * MIN_{i_k}. The worst case over normalised, decreasing
MIN vectors y gives the ratio LP::

    max t   s.t.  t <= row_Q . y   for every Q,
                  y_1 >= ... >= y_ell >= 0,  sum(y) = 1.

Both solvers below work with increments z_j = y_j - y_{j+1} >= 0, which turns
the monotonicity rows into sign constraints and the sum into sum_j j*z_j = 1.
They solve the dual of that LP (ell + 1 rows, one column per subset), so a
new subset from pricing is just a new column.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .heuristics import LevelSubset
from .lp import EQ, GE, LE, LinearProgram, Tableau, solve_lp

FULL_LEVEL_LIMIT = 16
COLGEN_TOL = 1e-9


class RatioGuardError(ValueError):
    pass


def t_of_q(q: LevelSubset) -> Fraction:
    """Closed-form ratio of the composite heuristic restricted to ``q``."""
    best = Fraction(0)
    total = 0
    nxt = q.levels[1:] + (q.ell + 1,)
    for i, j in zip(q.levels, nxt):
        total += j - 1
        best = max(best, Fraction(total, i))
    return best


def single_subset_lp(q: LevelSubset) -> LinearProgram:
    """The one-row LP whose optimum is t(q), written over y directly."""
    ell = q.ell
    lp = LinearProgram([1] + [0] * ell, lower=[None] + [0] * ell)
    lp.add_row([1] + [-a for a in q.coefficients()], LE, 0)
    _add_simplex_rows(lp, ell)
    return lp


def _add_simplex_rows(lp: LinearProgram, ell: int):
    for i in range(1, ell):
        row = [0] * (ell + 1)
        row[i], row[i + 1] = 1, -1
        lp.add_row(row, GE, 0)
    lp.add_row([0] + [1] * ell, EQ, 1)


def theorem_lp(ell: int, subsets: Sequence[LevelSubset] | None = None) -> LinearProgram:
    """The ratio LP over (t, y_1..y_ell) exactly as stated, one row per subset."""
    subsets = LevelSubset.all_for(ell) if subsets is None else subsets
    lp = LinearProgram([1] + [0] * ell, lower=[None] + [0] * ell)
    for q in subsets:
        lp.add_row([1] + [-a for a in q.coefficients()], LE, 0)
    _add_simplex_rows(lp, ell)
    return lp


@dataclass(frozen=True)
class ConstraintMatrix:
    ell: int
    rows: tuple[tuple[int, ...], ...]

    def subset(self, r: int) -> LevelSubset:
        """Rebuild the subset of row ``r`` from its nonzero pattern."""
        return LevelSubset(tuple(i + 1 for i, a in enumerate(self.rows[r]) if a), self.ell)


def build_matrix(ell: int) -> ConstraintMatrix:
    """Recursive construction M_l = [[P + M, 0], [M, l*1]], P_l = [[P, 0], [0, 1]]."""
    if not 1 <= ell <= FULL_LEVEL_LIMIT:
        raise RatioGuardError(f"build_matrix supports 1 <= ell <= {FULL_LEVEL_LIMIT}")
    M = np.array([[1]], dtype=np.int64)
    P = np.array([[1]], dtype=np.int64)
    for lv in range(2, ell + 1):
        h = M.shape[0]
        zero = np.zeros((h, 1), dtype=np.int64)
        M = np.block([[P + M, zero], [M, np.full((h, 1), lv, dtype=np.int64)]])
        P = np.block([[P, zero], [np.zeros((h, lv - 1), dtype=np.int64), np.ones((h, 1), dtype=np.int64)]])
    return ConstraintMatrix(ell, tuple(tuple(int(a) for a in row) for row in M))


def _is_float_vector(y) -> bool:
    return all(isinstance(v, (float, np.floating)) for v in y)


def pricing_best_q(y: Sequence) -> tuple[LevelSubset, object]:
    """Subset minimising sum_k (i_{k+1} - 1) * y_{i_k}.

    Shortest path from node 1 to node ell + 1 in the DAG with arcs i -> j
    (i < j) of weight (j - 1) * y_i; the visited nodes other than ell + 1 form
    the subset. Ties go to the lexicographically smallest subset: stopping
    (a prefix) beats continuing, then the smaller next level wins.
    """
    ell = len(y)
    if ell < 1:
        raise ValueError("y must be non-empty")
    if any(v < 0 for v in y):
        raise ValueError("pricing weights must be non-negative")
    nxt = [0] * (ell + 2)
    if _is_float_vector(y):
        yv = np.asarray(y, dtype=float)
        best = np.zeros(ell + 2)
        mult = np.arange(ell + 2, dtype=float) - 1     # arc i -> j costs (j - 1) * y_i
        tol = 1e-12 * max(1.0, float(yv.max()) * ell)
        for i in range(ell, 0, -1):
            vals = mult[i + 1:] * yv[i - 1] + best[i + 1:]
            near = vals <= vals.min() + tol
            k = len(vals) - 1 if near[-1] else int(near.argmax())
            best[i] = vals[k]
            nxt[i] = i + 1 + k
        value = float(best[1])
    else:
        best = [Fraction(0)] * (ell + 2)
        for i in range(ell, 0, -1):
            bj = ell + 1
            bi = ell * y[i - 1]
            for j in range(i + 1, ell + 1):
                v = (j - 1) * y[i - 1] + best[j]
                if v < bi:
                    bi, bj = v, j
            best[i], nxt[i] = bi, bj
        value = best[1]
    levels = [1]
    while nxt[levels[-1]] != ell + 1:
        levels.append(nxt[levels[-1]])
    return LevelSubset(tuple(levels), ell), value


def select_q_star(min_costs: Sequence) -> LevelSubset:
    """The subset Q* whose bound sum_k (i_{k+1}-1) * MIN_{i_k} is smallest.

    A single-terminal level has MIN = 0, so zeros are accepted.
    """
    if any(c < 0 for c in min_costs):
        raise ValueError("level minimum costs must be non-negative")
    q, _ = pricing_best_q(list(min_costs))
    return q


@dataclass
class RatioLpReport:
    ell: int
    t_value: float
    y_vector: tuple
    pool: list = field(default_factory=list)
    iterations: int = 0
    method: str = "colgen"
    pivots: int = 0

    def row_values(self) -> list:
        return [sum(a * yi for a, yi in zip(q.coefficients(), self.y_vector)) for q in self.pool]


def _z_column(q: LevelSubset) -> list:
    """Column of the dual master: [1] + [-(cumulative coefficient up to j)]."""
    cum = np.cumsum(q.coefficients()).tolist()
    return [1] + [-c for c in cum]


def _master_tableau(first: LevelSubset, ell: int, exact: bool) -> Tableau:
    # columns: w, then pool subsets; rows: sum(lambda) = 1, j*w - sum lambda*b_j >= 0
    A = [[0] + [v] for v in _z_column(first)]
    A[0][0] = 0
    for j in range(1, ell + 1):
        A[j][0] = j
    rels = [EQ] + [GE] * ell
    b = [1] + [0] * ell
    c = [-1, 0]
    return Tableau(A, rels, b, c, exact=exact, rule="dantzig")


def _y_from_duals(tab: Tableau, ell: int, exact: bool) -> tuple[object, list]:
    duals = tab.duals()
    z = [-d for d in duals[1:]]
    zero = Fraction(0) if exact else 0.0
    y, acc = [], zero
    for zj in reversed(z):
        acc += zj
        y.append(acc)
    y.reverse()
    if not exact:
        y = [max(0.0, float(v)) for v in y]
    return -tab.value, y


def _full_tableau(subsets: Sequence[LevelSubset], ell: int, exact: bool) -> Tableau:
    cols = [_z_column(q) for q in subsets]
    A = []
    for r in range(ell + 1):
        A.append([0 if r == 0 else r] + [col[r] for col in cols])
    rels = [EQ] + [GE] * ell
    b = [1] + [0] * ell
    c = [-1] + [0] * len(subsets)
    return Tableau(A, rels, b, c, exact=exact, rule="dantzig")


def compute_ratio(ell: int, method: str = "colgen", exact: bool = False,
                  max_iterations: int = 10_000) -> RatioLpReport:
    """Ratio t_ell of the composite heuristic.

    ``full`` solves the LP with all 2^(ell-1) subsets at once (ell <= 16).
    ``colgen`` starts from y = (1, 1/2, ..., 1/ell), adds the best-priced
    subset one at a time and re-optimises from the current basis; it stops
    when pricing returns a subset already in the pool or one whose value is
    not below t.
    """
    if ell < 1:
        raise RatioGuardError("ell must be at least 1")
    if method == "full":
        if ell > FULL_LEVEL_LIMIT:
            raise RatioGuardError(f"full method supports ell <= {FULL_LEVEL_LIMIT}")
        subsets = LevelSubset.all_for(ell)
        tab = _full_tableau(subsets, ell, exact)
        if tab.solve() != "optimal":
            raise RuntimeError(f"ratio LP not optimal: {tab.status}")
        t, y = _y_from_duals(tab, ell, exact)
        return RatioLpReport(ell, t, tuple(y), subsets, 1, "full", tab.pivots)
    if method != "colgen":
        raise ValueError(f"unknown method {method!r}")

    seed = [Fraction(1, i) for i in range(1, ell + 1)] if exact else [1.0 / i for i in range(1, ell + 1)]
    q, _ = pricing_best_q(seed)
    pool = [q]
    members = {q.levels}
    tab = _master_tableau(q, ell, exact)
    if tab.solve() != "optimal":
        raise RuntimeError(f"master LP not optimal: {tab.status}")
    t, y = _y_from_duals(tab, ell, exact)
    iterations = 1
    tol = 0 if exact else COLGEN_TOL
    while iterations < max_iterations:
        q, value = pricing_best_q(y)
        if q.levels in members or value >= t - tol:
            break
        pool.append(q)
        members.add(q.levels)
        tab.add_column(_z_column(q), 0)
        if tab.reoptimize() != "optimal":
            raise RuntimeError(f"master LP not optimal: {tab.status}")
        t, y = _y_from_duals(tab, ell, exact)
        iterations += 1
    return RatioLpReport(ell, t, tuple(y), pool, iterations, "colgen", tab.pivots)


def ratio_table(ells: Sequence[int], method: str = "colgen") -> list[tuple[int, float, int]]:
    """Rows (ell, t_ell, iterations) for the requested level counts."""
    out = []
    for ell in ells:
        rep = compute_ratio(ell, method)
        out.append((ell, float(rep.t_value), rep.iterations))
    return out
