"""Reading and writing the line-oriented ``mlst 1`` instance format.

::

    mlst 1
    n <V> m <E> l <L>
    e <u> <v> <w>        (E lines, 0-based ids)
    t <i> <k> <v1> ...   (L lines, i = 1..L bottom to top)

Blank lines and ``#`` comments are ignored.
"""
from __future__ import annotations

from decimal import Decimal
from fractions import Fraction
from pathlib import Path

from .graph import InvalidInstanceError, MlstInstance, WeightedGraph, validate_instance


class InstanceFormatError(ValueError):
    pass


def format_number(x: Fraction) -> str:
    """Exact decimal when the expansion terminates, else ``p/q``."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    d = x.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    if d != 1:
        return f"{x.numerator}/{x.denominator}"
    s = format(Decimal(x.numerator) / Decimal(x.denominator), "f")
    return s.rstrip("0").rstrip(".") if "." in s else s


def parse_number(tok: str) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError) as exc:
        raise InstanceFormatError(f"bad number {tok!r}") from exc


def loads(text: str) -> MlstInstance:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line.split())
    if not lines or lines[0] != ["mlst", "1"]:
        raise InstanceFormatError("missing 'mlst 1' header")
    if len(lines) < 2:
        raise InstanceFormatError("missing size line")
    head = lines[1]
    if len(head) != 6 or head[0::2] != ["n", "m", "l"]:
        raise InstanceFormatError("size line must be 'n <V> m <E> l <L>'")
    try:
        n, m, ell = int(head[1]), int(head[3]), int(head[5])
    except ValueError as exc:
        raise InstanceFormatError("non-integer size") from exc
    body = lines[2:]
    if len(body) != m + ell:
        raise InstanceFormatError(f"expected {m} edge and {ell} terminal lines, got {len(body)}")
    edges = []
    for toks in body[:m]:
        if len(toks) != 4 or toks[0] != "e":
            raise InstanceFormatError(f"bad edge line: {' '.join(toks)}")
        edges.append((int(toks[1]), int(toks[2]), parse_number(toks[3])))
    terminals = []
    for expect, toks in enumerate(body[m:], start=1):
        if len(toks) < 3 or toks[0] != "t":
            raise InstanceFormatError(f"bad terminal line: {' '.join(toks)}")
        i, k = int(toks[1]), int(toks[2])
        if i != expect or len(toks) != 3 + k:
            raise InstanceFormatError(f"bad terminal line for level {expect}")
        terminals.append([int(v) for v in toks[3:]])
    try:
        graph = WeightedGraph.from_edges(n, edges)
    except InvalidInstanceError as exc:
        raise InstanceFormatError(str(exc)) from exc
    inst = MlstInstance(graph, tuple(frozenset(t) for t in terminals))
    report = validate_instance(inst)
    if not report.ok:
        raise InstanceFormatError("invalid instance: " + "; ".join(report.violations))
    return inst


def dumps(instance: MlstInstance) -> str:
    """Canonical text: edges sorted by (u, v) with u < v, terminals ascending."""
    g = instance.graph
    edges = sorted((min(e.u, e.v), max(e.u, e.v), e.cost) for e in g.edges)
    out = ["mlst 1", f"n {g.vertex_count} m {len(edges)} l {instance.levels}"]
    out += [f"e {u} {v} {format_number(w)}" for u, v, w in edges]
    for i, t in enumerate(instance.terminals, start=1):
        vs = sorted(t)
        out.append(" ".join(["t", str(i), str(len(vs))] + [str(v) for v in vs]))
    return "\n".join(out) + "\n"


def load(path) -> MlstInstance:
    return loads(Path(path).read_text(encoding="utf-8"))


def dump(instance: MlstInstance, path) -> None:
    Path(path).write_text(dumps(instance), encoding="utf-8")
