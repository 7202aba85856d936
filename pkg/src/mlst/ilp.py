"""MLST integer programs written as LP-format text.

Four models: cut-based, multi-commodity flow, single-commodity flow per level,
and the reduced single-flow model with level-count variables y. Each emitter
checks its own variable and constraint counts against the closed forms in
``expected_counts``. ``write_lp`` / ``parse_lp`` round-trip byte for byte.

Names: ``x_{u}_{v}_{i}`` (u < v) for undirected level variables,
``xd_{u}_{v}_{i}``, ``y_{u}_{v}``, ``f_{u}_{v}...`` for arcs.
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .graph import MlstInstance
from .io import dumps

FORMS = ("cut", "mcf", "scf", "reduced")
CUT_VERTEX_LIMIT = 20
BINARY, INTEGER, CONTINUOUS = "binary", "integer", "continuous"
INF = float("inf")


class IlpGuardError(ValueError):
    pass


class LpFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str
    lower: object = 0
    upper: object = INF


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: tuple[tuple[str, object], ...]
    sense: str          # "<=", ">=", "="
    rhs: object


@dataclass
class IlpModel:
    name: str
    variables: list[Variable] = field(default_factory=list)
    objective: list[tuple[str, object]] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)
    header: list[str] = field(default_factory=list)

    def add_var(self, name, kind, lower=0, upper=INF):
        self.variables.append(Variable(name, kind, _num(lower), _num(upper)))
        return name

    def add_row(self, name, terms, sense, rhs):
        self.constraints.append(
            Constraint(name, tuple((v, _num(c)) for v, c in terms), sense, _num(rhs)))

    def check(self) -> list[str]:
        problems = []
        names = [v.name for v in self.variables]
        declared = set(names)
        if len(declared) != len(names):
            problems.append("duplicate variable names")
        rows = [c.name for c in self.constraints]
        if len(set(rows)) != len(rows):
            problems.append("duplicate constraint names")
        for v, _ in self.objective:
            if v not in declared:
                problems.append(f"objective uses undeclared {v}")
        for c in self.constraints:
            for v, _ in c.terms:
                if v not in declared:
                    problems.append(f"{c.name} uses undeclared {v}")
        return problems

    def counts(self) -> dict[str, int]:
        out = {"variables": len(self.variables), "constraints": len(self.constraints)}
        for c in self.constraints:
            key = c.name.split("_")[0]
            out[key] = out.get(key, 0) + 1
        for v in self.variables:
            key = "var_" + v.name.split("_")[0]
            out[key] = out.get(key, 0) + 1
        return out


def _num(x):
    """Integral values become int, everything else a float."""
    if x == INF:
        return INF
    if isinstance(x, (int, Fraction)) or float(x).is_integer():
        if Fraction(x).denominator == 1:
            return int(x)
    return float(x)


def instance_hash(instance: MlstInstance) -> str:
    return hashlib.sha256(dumps(instance).encode()).hexdigest()[:16]


def _pairs(instance):
    """Undirected edges as (u, v, cost) with u < v, sorted."""
    return sorted((min(e.u, e.v), max(e.u, e.v), e.cost) for e in instance.graph.edges)


def _arcs(instance):
    out = []
    for u, v, c in _pairs(instance):
        out.append((u, v, c))
        out.append((v, u, c))
    return sorted(out)


def _source(instance) -> int:
    return min(instance.level_terminals(instance.levels))


def _new_model(instance, form, notes=()) -> IlpModel:
    model = IlpModel(f"mlst_{form}")
    model.header = [f"formulation: {form}", f"instance: {instance_hash(instance)}",
                    f"levels: {instance.levels}"] + [f"note: {n}" for n in notes]
    return model


def _x(u, v, i):
    return f"x_{u}_{v}_{i}"


def _add_level_x(model, instance):
    ell = instance.levels
    for i in range(1, ell + 1):
        for u, v, _ in _pairs(instance):
            model.add_var(_x(u, v, i), BINARY, 0, 1)
    model.objective = [(_x(u, v, i), _num(c)) for i in range(1, ell + 1) for u, v, c in _pairs(instance)]


def _add_links(model, instance, name_of, edges):
    for i in range(2, instance.levels + 1):
        for u, v in edges:
            model.add_row(f"link_{i}_{u}_{v}", [(name_of(u, v, i), 1), (name_of(u, v, i - 1), -1)], "<=", 0)


def emit_cut_based(instance: MlstInstance, vertex_limit: int = CUT_VERTEX_LIMIT) -> IlpModel:
    n = instance.graph.vertex_count
    if n > vertex_limit:
        raise IlpGuardError(f"cut-based model needs |V| <= {vertex_limit}, got {n}")
    model = _new_model(instance, "cut", ["T in the cut rows is read as T_i on level i",
                                         "S and V-S give the same cut; S never contains the last vertex"])
    _add_level_x(model, instance)
    pairs = _pairs(instance)
    for i in range(1, instance.levels + 1):
        tmask = sum(1 << t for t in instance.level_terminals(i))
        if bin(tmask).count("1") < 2:
            continue
        for S in range(1 << (n - 1)):
            inter = S & tmask
            if inter == 0 or inter == tmask:
                continue
            terms = [(_x(u, v, i), 1) for u, v, _ in pairs if (S >> u & 1) != (S >> v & 1)]
            model.add_row(f"cut_{i}_{S:x}", terms, ">=", 1)
    _add_links(model, instance, _x, [(u, v) for u, v, _ in pairs])
    _assert_counts(model, instance, "cut")
    return model


def _conservation(model, instance, level, flow_name, supply, row_name):
    arcs = _arcs(instance)
    for w in range(instance.graph.vertex_count):
        terms = [(flow_name(a, b), 1) for a, b, _ in arcs if a == w]
        terms += [(flow_name(a, b), -1) for a, b, _ in arcs if b == w]
        model.add_row(row_name(w), terms, "=", supply(w))


def emit_multicommodity(instance: MlstInstance) -> IlpModel:
    model = _new_model(instance, "mcf", ["added coupling f^p_uv + f^p_vu <= x_uv, absent from the displayed model",
                                         "source s is the smallest vertex id of T_ell"])
    _add_level_x(model, instance)
    s = _source(instance)
    pairs = _pairs(instance)
    arcs = _arcs(instance)
    for i in range(1, instance.levels + 1):
        for p in sorted(instance.level_terminals(i) - {s}):
            def fname(a, b, p=p, i=i):
                return f"f_{a}_{b}_{p}_{i}"
            for a, b, _ in arcs:
                model.add_var(fname(a, b), CONTINUOUS, 0, 1)

            def supply(w, p=p):
                return 1 if w == s else (-1 if w == p else 0)
            _conservation(model, instance, i, fname, supply, lambda w, p=p, i=i: f"cons_{i}_{p}_{w}")
            for u, v, _ in pairs:
                model.add_row(f"cap_{i}_{p}_{u}_{v}",
                              [(fname(u, v), 1), (fname(v, u), 1), (_x(u, v, i), -1)], "<=", 0)
    _add_links(model, instance, _x, [(u, v) for u, v, _ in pairs])
    _assert_counts(model, instance, "mcf")
    return model


def emit_single_flow(instance: MlstInstance) -> IlpModel:
    model = _new_model(instance, "scf", ["linking written x^i <= x^(i-1) so that E_i is inside E_(i-1)",
                                         "source s is the smallest vertex id of T_ell"])
    ell = instance.levels
    s = _source(instance)
    arcs = _arcs(instance)

    def xd(a, b, i):
        return f"xd_{a}_{b}_{i}"

    for i in range(1, ell + 1):
        for a, b, _ in arcs:
            model.add_var(xd(a, b, i), BINARY, 0, 1)
    model.objective = [(xd(a, b, i), _num(c)) for i in range(1, ell + 1) for a, b, c in arcs]
    for i in range(1, ell + 1):
        terms = instance.level_terminals(i)
        k = len(terms) - 1
        for a, b, _ in arcs:
            model.add_var(f"f_{a}_{b}_{i}", CONTINUOUS, 0, INF)

        def supply(w, terms=terms, k=k):
            return k if w == s else (-1 if w in terms else 0)
        _conservation(model, instance, i, lambda a, b, i=i: f"f_{a}_{b}_{i}", supply,
                      lambda w, i=i: f"cons_{i}_{w}")
        for a, b, _ in arcs:
            model.add_row(f"cap_{i}_{a}_{b}", [(f"f_{a}_{b}_{i}", 1), (xd(a, b, i), -k)], "<=", 0)
    _add_links(model, instance, xd, [(a, b) for a, b, _ in arcs])
    _assert_counts(model, instance, "scf")
    return model


def terminal_level(instance: MlstInstance, v: int) -> int:
    """L(v): highest level with v as a terminal, 0 if none."""
    return instance.vertex_level(v)


def emit_reduced_flow(instance: MlstInstance) -> IlpModel:
    model = _new_model(instance, "reduced", ["source s is the smallest vertex id of T_ell",
                                             "f and y continuous, x binary"])
    ell = instance.levels
    n = instance.graph.vertex_count
    s = _source(instance)
    t1 = instance.level_terminals(1)
    k = len(t1) - 1
    arcs = _arcs(instance)
    nbrs = [[] for _ in range(n)]
    for a, b, _ in arcs:
        nbrs[b].append(a)

    def xd(a, b):
        return f"xd_{a}_{b}_1"

    for a, b, _ in arcs:
        model.add_var(xd(a, b), BINARY, 0, 1)
    for a, b, _ in arcs:
        model.add_var(f"y_{a}_{b}", CONTINUOUS, 0, ell)
    for a, b, _ in arcs:
        model.add_var(f"f_{a}_{b}", CONTINUOUS, 0, INF)
    model.objective = [(f"y_{a}_{b}", _num(c)) for a, b, c in arcs]

    def supply(w):
        return k if w == s else (-1 if w in t1 else 0)
    _conservation(model, instance, 1, lambda a, b: f"f_{a}_{b}", supply, lambda w: f"c2_{w}")
    for a, b, _ in arcs:
        model.add_row(f"c3_{a}_{b}", [(f"f_{a}_{b}", 1), (xd(a, b), -k)], "<=", 0)
    for v in range(n):
        model.add_row(f"c4_{v}", [(xd(u, v), 1) for u in nbrs[v]], "<=", 1)
    for a, b, _ in arcs:
        model.add_row(f"c5a_{a}_{b}", [(xd(a, b), 1), (f"y_{a}_{b}", -1)], "<=", 0)
        model.add_row(f"c5b_{a}_{b}", [(f"y_{a}_{b}", 1), (xd(a, b), -ell)], "<=", 0)
    for v, w, _ in arcs:
        if v == s:
            continue
        model.add_row(f"c6_{v}_{w}", [(xd(u, v), 1) for u in nbrs[v] if u != w] + [(xd(v, w), -1)], ">=", 0)
    for v, w, _ in arcs:
        if v == s:
            continue
        model.add_row(f"c7_{v}_{w}",
                      [(f"y_{u}_{v}", 1) for u in nbrs[v] if u != w] + [(f"y_{v}_{w}", -1)], ">=", 0)
    for v in sorted(t1 - {s}):
        model.add_row(f"c8_{v}", [(f"y_{u}_{v}", 1) for u in nbrs[v]], ">=", terminal_level(instance, v))
    _assert_counts(model, instance, "reduced")
    return model


EMITTERS = {
    "cut": emit_cut_based,
    "mcf": emit_multicommodity,
    "scf": emit_single_flow,
    "reduced": emit_reduced_flow,
}


def emit(instance: MlstInstance, form: str) -> IlpModel:
    if form not in EMITTERS:
        raise ValueError(f"unknown formulation {form!r}; choose from {', '.join(FORMS)}")
    return EMITTERS[form](instance)


def expected_counts(instance: MlstInstance, form: str) -> dict[str, int]:
    """Closed-form variable and constraint counts for each formulation."""
    n = instance.graph.vertex_count
    m = instance.graph.edge_count
    ell = instance.levels
    sizes = [len(instance.level_terminals(i)) for i in range(1, ell + 1)]
    links = (ell - 1) * m
    if form == "cut":
        cuts = sum((1 << (n - 1)) - (1 << (n - t)) for t in sizes if t >= 2)
        return {"variables": ell * m, "constraints": cuts + links}
    if form == "mcf":
        com = sum(t - 1 for t in sizes)
        return {"variables": ell * m + 2 * m * com,
                "constraints": com * (n + m) + links}
    if form == "scf":
        return {"variables": 4 * ell * m, "constraints": ell * n + 2 * ell * m + 2 * links}
    if form == "reduced":
        ds = sum(1 for e in instance.graph.edges if _source(instance) in (e.u, e.v))
        return {"variables": 6 * m,
                "constraints": 2 * n + 10 * m - 2 * ds + sizes[0] - 1}
    raise ValueError(f"unknown formulation {form!r}")


def _assert_counts(model, instance, form):
    want = expected_counts(instance, form)
    got = model.counts()
    for key, val in want.items():
        if got[key] != val:
            raise AssertionError(f"{form}: {key} = {got[key]}, expected {val}")
    problems = model.check()
    if problems:
        raise AssertionError(f"{form}: " + "; ".join(problems[:3]))


# -- LP text -------------------------------------------------------------

_TERMS_PER_LINE = 8


def _fmt(c) -> str:
    if c == INF:
        return "inf"
    if isinstance(c, int):
        return str(c)
    return repr(float(c))


def _expr(terms) -> list[str]:
    parts = []
    for k, (v, c) in enumerate(terms):
        if k == 0:
            parts.append(f"{_fmt(c)} {v}")
        elif c < 0:
            parts.append(f"- {_fmt(-c)} {v}")
        else:
            parts.append(f"+ {_fmt(c)} {v}")
    if not parts:
        parts = ["0"]
    return [" ".join(parts[k:k + _TERMS_PER_LINE]) for k in range(0, len(parts), _TERMS_PER_LINE)]


def _statement(label, terms, tail="") -> list[str]:
    chunks = _expr(terms)
    chunks[-1] += tail
    return [f" {label}: {chunks[0]}"] + [f"   {c}" for c in chunks[1:]]


def write_lp(model: IlpModel) -> str:
    out = [f"\\ {h}" for h in [f"model: {model.name}"] + model.header]
    out.append("Minimize")
    out += _statement("obj", model.objective)
    out.append("Subject To")
    for c in model.constraints:
        out += _statement(c.name, c.terms, f" {c.sense} {_fmt(c.rhs)}")
    out.append("Bounds")
    for v in model.variables:
        if v.upper == INF:
            out.append(f" {v.name} >= {_fmt(v.lower)}")
        else:
            out.append(f" {_fmt(v.lower)} <= {v.name} <= {_fmt(v.upper)}")
    for section, kind in (("Binary", BINARY), ("General", INTEGER)):
        names = [v.name for v in model.variables if v.kind == kind]
        if names:
            out.append(section)
            out += [f" {nm}" for nm in names]
    out.append("End")
    return "\n".join(out) + "\n"


def _parse_num(tok: str):
    if tok == "inf":
        return INF
    try:
        return int(tok)
    except ValueError:
        try:
            return float(tok)
        except ValueError as exc:
            raise LpFormatError(f"bad number {tok!r}") from exc


def _parse_terms(tokens: list[str]) -> list[tuple[str, object]]:
    if tokens == ["0"]:
        return []
    terms = []
    k = 0
    sign = 1
    while k < len(tokens):
        tok = tokens[k]
        if tok in "+-":
            sign = -1 if tok == "-" else 1
            k += 1
            continue
        if k + 1 >= len(tokens):
            raise LpFormatError(f"dangling coefficient {tok!r}")
        c = _parse_num(tok)
        terms.append((tokens[k + 1], -c if sign < 0 else c))
        sign = 1
        k += 2
    return terms


_LABEL = re.compile(r"^ (\S+): (.*)$")


def parse_lp(text: str) -> IlpModel:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    header, name = [], ""
    k = 0
    while k < len(lines) and lines[k].startswith("\\ "):
        body = lines[k][2:]
        if body.startswith("model: ") and not name:
            name = body[len("model: "):]
        else:
            header.append(body)
        k += 1
    model = IlpModel(name, header=header)
    section = None
    stmts: list[list[str]] = []
    bounds: list[str] = []
    kinds: dict[str, str] = {}
    for line in lines[k:]:
        if line in ("Minimize", "Subject To", "Bounds", "Binary", "General", "End"):
            section = line
            continue
        if section in ("Minimize", "Subject To"):
            m = _LABEL.match(line)
            if m:
                stmts.append([section, m.group(1), m.group(2)])
            elif line.startswith("   ") and stmts:
                stmts[-1][2] += " " + line.strip()
            else:
                raise LpFormatError(f"cannot parse line {line!r}")
        elif section == "Bounds":
            bounds.append(line.strip())
        elif section in ("Binary", "General"):
            kinds[line.strip()] = BINARY if section == "Binary" else INTEGER
        elif section == "End":
            raise LpFormatError("text after End")
        else:
            raise LpFormatError(f"line outside any section: {line!r}")
    if section != "End":
        raise LpFormatError("missing End")
    for sec, label, body in stmts:
        toks = body.split()
        if sec == "Minimize":
            model.objective = _parse_terms(toks)
            continue
        if len(toks) < 2 or toks[-2] not in ("<=", ">=", "="):
            raise LpFormatError(f"constraint {label} lacks a relation")
        model.constraints.append(
            Constraint(label, tuple(_parse_terms(toks[:-2])), toks[-2], _parse_num(toks[-1])))
    for b in bounds:
        toks = b.split()
        if len(toks) == 3 and toks[1] == ">=":
            nm, lo, hi = toks[0], _parse_num(toks[2]), INF
        elif len(toks) == 5 and toks[1] == toks[3] == "<=":
            nm, lo, hi = toks[2], _parse_num(toks[0]), _parse_num(toks[4])
        else:
            raise LpFormatError(f"bad bound line {b!r}")
        model.variables.append(Variable(nm, kinds.get(nm, CONTINUOUS), lo, hi))
    return model


# -- external MIP solve (HiGHS through scipy) --------------------------------

def solve_with_highs(model: IlpModel, time_limit: float | None = None):
    """Objective value of ``model`` from scipy's HiGHS MILP; None if not optimal."""
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp
    from scipy.sparse import coo_matrix

    index = {v.name: k for k, v in enumerate(model.variables)}
    nv = len(index)
    c = np.zeros(nv)
    for nm, coef in model.objective:
        c[index[nm]] += float(coef)
    rows, cols, vals = [], [], []
    lo = np.full(len(model.constraints), -np.inf)
    hi = np.full(len(model.constraints), np.inf)
    for r, con in enumerate(model.constraints):
        for nm, coef in con.terms:
            rows.append(r)
            cols.append(index[nm])
            vals.append(float(coef))
        if con.sense in ("<=", "="):
            hi[r] = float(con.rhs)
        if con.sense in (">=", "="):
            lo[r] = float(con.rhs)
    integrality = np.array([0 if v.kind == CONTINUOUS else 1 for v in model.variables])
    bounds = Bounds([float(v.lower) for v in model.variables], [float(v.upper) for v in model.variables])
    options = {"time_limit": time_limit} if time_limit else {}
    A = coo_matrix((vals, (rows, cols)), shape=(len(model.constraints), nv)).tocsr()
    cons = [LinearConstraint(A, lo, hi)] if model.constraints else []
    res = milp(c, constraints=cons, integrality=integrality, bounds=bounds, options=options)
    if res.status != 0:
        return None
    return float(res.fun)


def rooted_flow_model(instance: MlstInstance) -> IlpModel:
    """Solve-only model used to compute OPT in experiments.

    Arcs are oriented away from s with nested binaries xd^i <= xd^(i-1); each
    terminal t of T_1 other than s gets its own unit flow, capped by the arcs of
    level L(t), and every vertex has in-degree at most one per level. Optimal
    MLSTs are nested trees through s, so this is exact, and its LP bound is the
    directed cut bound, far stronger than the aggregated models above.
    """
    model = _new_model(instance, "rooted", ["solve-only: per-terminal flows on nested directed levels",
                                            "source s is the smallest vertex id of T_ell"])
    ell = instance.levels
    n = instance.graph.vertex_count
    s = _source(instance)
    arcs = _arcs(instance)
    into = [[] for _ in range(n)]
    out = [[] for _ in range(n)]
    for a, b, _ in arcs:
        out[a].append(b)
        into[b].append(a)

    def xd(a, b, i):
        return f"xd_{a}_{b}_{i}"

    for i in range(1, ell + 1):
        for a, b, _ in arcs:
            model.add_var(xd(a, b, i), BINARY, 0, 1)
    model.objective = [(xd(a, b, i), _num(c)) for i in range(1, ell + 1) for a, b, c in arcs]
    _add_links(model, instance, xd, [(a, b) for a, b, _ in arcs])
    for t in sorted(instance.level_terminals(1) - {s}):
        lv = instance.vertex_level(t)
        for a, b, _ in arcs:
            model.add_var(f"f_{a}_{b}_{t}", CONTINUOUS, 0, 1)
        for w in range(n):
            terms = [(f"f_{w}_{b}_{t}", 1) for b in out[w]] + [(f"f_{a}_{w}_{t}", -1) for a in into[w]]
            model.add_row(f"cons_{t}_{w}", terms, "=", 1 if w == s else (-1 if w == t else 0))
        for a, b, _ in arcs:
            model.add_row(f"cap_{t}_{a}_{b}", [(f"f_{a}_{b}_{t}", 1), (xd(a, b, lv), -1)], "<=", 0)
    for i in range(1, ell + 1):
        for w in range(n):
            model.add_row(f"indeg_{i}_{w}", [(xd(a, w, i), 1) for a in into[w]], "<=", 0 if w == s else 1)
    return model
