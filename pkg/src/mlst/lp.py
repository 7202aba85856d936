"""Dense two-phase primal simplex with Bland's rule.

Small and deterministic rather than fast. ``exact=True`` runs the same pivots
on :class:`fractions.Fraction` entries.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.linalg.blas import dger

LE, GE, EQ = "<=", ">=", "="
OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"
FLOAT_TOL = 1e-9
PIVOT_TOL = 1e-7
MAX_PIVOTS = 100_000


@dataclass
class LinearProgram:
    """``max objective @ x`` subject to ``rows`` and variable bounds.

    ``lower`` defaults to 0 for every variable; a ``None`` entry makes the
    variable free. ``upper`` entries of ``None`` mean no upper bound.
    """

    objective: Sequence
    rows: list = field(default_factory=list)   # (coefficients, relation, rhs)
    lower: Sequence | None = None
    upper: Sequence | None = None

    @property
    def n(self) -> int:
        return len(self.objective)

    def add_row(self, coefficients, relation, rhs):
        if relation not in (LE, GE, EQ):
            raise ValueError(f"unknown relation {relation!r}")
        self.rows.append((list(coefficients), relation, rhs))


@dataclass
class LpResult:
    status: str
    value: object = None
    x: list | None = None
    duals: list | None = None
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class Tableau:
    """Simplex tableau for ``max c x, A x (rel) b, x >= 0``.

    Keeps the initial identity columns so that dual values and new columns
    can be computed from the current basis inverse.
    """

    def __init__(self, A, relations, b, c, exact: bool = False, rule: str = "bland"):
        if rule not in ("bland", "dantzig"):
            raise ValueError(f"unknown pivot rule {rule!r}")
        self.rule = rule
        self.exact = exact
        self.tol = 0 if exact else FLOAT_TOL
        conv = Fraction if exact else float
        dtype = object if exact else float
        m = len(relations)
        n = len(c)
        A = [[conv(a) for a in row] for row in A]
        b = [conv(x) for x in b]
        self.sign = []
        rels = []
        for i in range(m):
            if len(A[i]) != n:
                raise ValueError(f"row {i} has {len(A[i])} coefficients, expected {n}")
            rel = relations[i]
            # a >= row with zero rhs flips to <= so its slack can start basic
            s = -1 if b[i] < 0 or (b[i] == 0 and rel == GE) else 1
            if s < 0:
                A[i] = [-a for a in A[i]]
                b[i] = -b[i]
                rel = {LE: GE, GE: LE, EQ: EQ}[rel]
            self.sign.append(s)
            rels.append(rel)
        n_slack = sum(r != EQ for r in rels)
        n_art = sum(r != LE for r in rels)
        N = n + n_slack + n_art
        T = np.zeros((m, N), dtype=dtype)
        if exact:
            T[:, :] = Fraction(0)
        for i in range(m):
            T[i, :n] = A[i]
        self.kind = ["x"] * n + ["s"] * n_slack + ["a"] * n_art
        self.basis = [0] * m
        self.ident = [0] * m
        si, ai = n, n + n_slack
        for i, rel in enumerate(rels):
            if rel != EQ:
                T[i, si] = 1 if rel == LE else -1
                if rel == LE:
                    self.basis[i] = self.ident[i] = si
                si += 1
            if rel != LE:
                T[i, ai] = 1
                self.basis[i] = self.ident[i] = ai
                ai += 1
        self._buf = T if exact else np.asfortranarray(T)
        self._ncols = N
        self.rhs = np.array(b, dtype=dtype)
        self.c = np.zeros(N, dtype=dtype)
        if exact:
            self.c[:] = Fraction(0)
        self.c[:n] = [conv(x) for x in c]
        self.n_struct = n
        self.pivots = 0
        self.status = None

    @property
    def T(self):
        return self._buf[:, :self._ncols]

    # -- core pivoting -------------------------------------------------
    def _reduced(self, cost):
        cb = cost[self.basis]
        return cost - cb @ self.T

    def _pivot(self, r, j):
        T = self.T
        piv = T[r, j]
        T[r] = T[r] / piv
        self.rhs[r] = self.rhs[r] / piv
        col = T[:, j].copy()
        col[r] = 0
        if self.exact:
            nz = np.nonzero(col != 0)[0]
            if len(nz):
                T[nz] -= np.outer(col[nz], T[r])
        else:
            # in-place rank-one update on the Fortran-ordered buffer
            dger(-1.0, col, T[r], a=T, overwrite_a=1)
        self.rhs -= col * self.rhs[r]
        self.basis[r] = j
        self.pivots += 1

    def _iterate(self, cost, allowed) -> str:
        # "dantzig" takes the largest reduced cost but drops to Bland's rule
        # after a degenerate pivot until the objective moves again.
        tol = self.tol
        bland = self.rule == "bland"
        basis = np.asarray(self.basis)
        d = self._reduced(cost)
        since = 0
        while True:
            if self.pivots > MAX_PIVOTS:
                raise RuntimeError("simplex pivot limit exceeded")
            if not self.exact and since >= 64:
                d, since = self._reduced(cost), 0
            cand = np.nonzero((d > tol) & allowed)[0]
            if len(cand) == 0 and since:
                d, since = self._reduced(cost), 0
                cand = np.nonzero((d > tol) & allowed)[0]
            if len(cand) == 0:
                return OPTIMAL
            if bland:
                j = int(cand[0])
            else:
                j = int(cand[np.argmax(d[cand])])
            col = self.T[:, j]
            rows = np.nonzero(col > (tol if self.exact else PIVOT_TOL))[0]
            if len(rows) == 0:
                return UNBOUNDED
            if self.exact:
                ratios = [self.rhs[i] / col[i] for i in rows]
                best = min(ratios)
                near = [i for i, rt in zip(rows, ratios) if rt == best]
                r = min(near, key=lambda i: self.basis[i])
            else:
                ratios = self.rhs[rows] / col[rows]
                best = ratios.min()
                near = rows[ratios <= best + tol]
                # Bland needs the lowest basic index; otherwise favour a big pivot
                r = near[np.argmin(basis[near])] if bland else near[np.argmax(col[near])]
            if self.rule == "dantzig":
                bland = best <= tol
            self._pivot(int(r), j)
            basis[r] = j
            d = d - d[j] * self.T[r]
            since += 1

    def solve(self) -> str:
        N = len(self.kind)
        is_art = np.array([k == "a" for k in self.kind])
        if is_art.any():
            phase1 = np.zeros(N, dtype=self.c.dtype)
            if self.exact:
                phase1[:] = Fraction(0)
            phase1[is_art] = -1
            self._iterate(phase1, np.ones(N, dtype=bool))
            if phase1[self.basis] @ self.rhs < -self.tol * max(1, len(self.basis)):
                self.status = INFEASIBLE
                return self.status
            self._drive_out_artificials(is_art)
        self.status = self._iterate(self.c, ~is_art)
        return self.status

    def _drive_out_artificials(self, is_art):
        for r, j in enumerate(list(self.basis)):
            if not is_art[j]:
                continue
            row = self.T[r]
            cand = [k for k in range(len(self.kind))
                    if not is_art[k] and abs(row[k]) > self.tol]
            if cand:
                self._pivot(r, cand[0])

    def reoptimize(self) -> str:
        is_art = np.array([k == "a" for k in self.kind])
        self.status = self._iterate(self.c, ~is_art)
        return self.status

    # -- results ---------------------------------------------------------
    @property
    def value(self):
        return self.c[self.basis] @ self.rhs

    def point(self) -> list:
        x = [Fraction(0) if self.exact else 0.0] * len(self.kind)
        for r, j in enumerate(self.basis):
            x[j] = self.rhs[r]
        return [x[j] for j, k in enumerate(self.kind) if k == "x"]

    def duals(self) -> list:
        """Row prices with ``value == sum(duals[i] * b[i])`` over the original rows."""
        cb = self.c[self.basis]
        return [s * (cb @ self.T[:, self.ident[i]]) for i, s in enumerate(self.sign)]

    def add_column(self, coefficients, cost) -> int:
        """Append a structural column and return its index among structural columns."""
        conv = Fraction if self.exact else float
        if self.exact:
            a = np.array([s * conv(v) for s, v in zip(self.sign, coefficients)], dtype=object)
        else:
            a = np.asarray(self.sign, dtype=float) * np.asarray(coefficients, dtype=float)
        new = self.T[:, self.ident] @ a
        pos = self._first_non_struct()
        n = self._ncols
        if n == self._buf.shape[1]:
            grow = np.zeros((self._buf.shape[0], max(16, n)), dtype=self._buf.dtype)
            if self.exact:
                grow[:, :] = Fraction(0)
            self._buf = np.concatenate([self._buf, grow], axis=1)
            if not self.exact:
                self._buf = np.asfortranarray(self._buf)
        buf = self._buf
        buf[:, pos + 1:n + 1] = buf[:, pos:n].copy()
        buf[:, pos] = new
        self._ncols = n + 1
        self.c = np.insert(self.c, pos, conv(cost))
        self.kind.insert(pos, "x")
        self.basis = [j + 1 if j >= pos else j for j in self.basis]
        self.ident = [j + 1 if j >= pos else j for j in self.ident]
        self.n_struct += 1
        return pos

    def _first_non_struct(self) -> int:
        return self.n_struct


def _standard_form(lp: LinearProgram):
    """Shift lower bounds, split free variables, turn upper bounds into rows."""
    n = lp.n
    lower = list(lp.lower) if lp.lower is not None else [0] * n
    upper = list(lp.upper) if lp.upper is not None else [None] * n
    if len(lower) != n or len(upper) != n:
        raise ValueError("bound vectors must match the objective length")
    cols = []   # (original var, multiplier)
    for j in range(n):
        cols.append((j, 1))
        if lower[j] is None:
            cols.append((j, -1))
    A, rels, b = [], [], []
    for coeffs, rel, rhs in lp.rows:
        if len(coeffs) != n:
            raise ValueError("dimension mismatch between row and objective")
        shift = sum(coeffs[j] * lower[j] for j in range(n) if lower[j] is not None)
        A.append([coeffs[j] * mlt for j, mlt in cols])
        rels.append(rel)
        b.append(rhs - shift)
    for j in range(n):
        if upper[j] is not None:
            row = [0] * len(cols)
            row[cols.index((j, 1))] = 1
            if lower[j] is None:
                row[cols.index((j, -1))] = -1
            A.append(row)
            rels.append(LE)
            b.append(upper[j] - (lower[j] or 0))
    c = [lp.objective[j] * mlt for j, mlt in cols]
    return A, rels, b, c, cols, lower


def solve_lp(lp: LinearProgram, exact: bool = False) -> LpResult:
    A, rels, b, c, cols, lower = _standard_form(lp)
    tab = Tableau(A, rels, b, c, exact=exact)
    status = tab.solve()
    if status != OPTIMAL:
        return LpResult(status, pivots=tab.pivots)
    xs = tab.point()
    zero = Fraction(0) if exact else 0.0
    x = [zero if lower[j] is None else (Fraction(lower[j]) if exact else float(lower[j]))
         for j in range(lp.n)]
    for (j, mlt), val in zip(cols, xs):
        x[j] += mlt * val
    value = sum((lp.objective[j] * x[j] for j in range(lp.n)), zero)
    duals = tab.duals()[:len(lp.rows)]
    return LpResult(OPTIMAL, value, x, duals, tab.pivots)
