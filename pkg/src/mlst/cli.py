"""``mlst`` command line.

Exit codes: 0 ok, 2 usage, 3 guard violation, 4 data error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import experiments as ex
from .graph import InvalidInstanceError
from .heuristics import (LevelLimitError, LevelSubset, bottom_up, composite_full, composite_on_q,
                         guaranteed_composite, top_down)
from .ilp import FORMS, IlpGuardError, emit, write_lp
from .io import InstanceFormatError, dumps, format_number, load
from .netgen import MODELS, TSMS, GenerationError, GenSpec, generate_instance
from .oracle import OracleGuardError, oracle_mlst
from .ratio import RatioGuardError, compute_ratio
from .steiner import APPROX2, MODES, GraphNotConnectedError, TerminalLimitError

EXIT_OK, EXIT_USAGE, EXIT_GUARD, EXIT_DATA = 0, 2, 3, 4
GUARDS = (TerminalLimitError, LevelLimitError, RatioGuardError, OracleGuardError, IlpGuardError)
DATA = (InstanceFormatError, InvalidInstanceError, GenerationError, ex.ConfigError,
        GraphNotConnectedError, OSError, ValueError)


class UsageError(Exception):
    pass


def _emit(text: str, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_gen(a):
    spec = GenSpec(a.model, a.n, a.ell, a.tsm, a.seed, eps=a.eps, K=a.K, beta=a.beta, m0=a.m0, m=a.m)
    _emit(dumps(generate_instance(spec)), a.out)


def _parse_q(text, ell):
    try:
        return LevelSubset.of((int(s) for s in text.split(",") if s.strip()), ell)
    except ValueError as exc:
        raise UsageError(f"bad --q {text!r}: {exc}") from exc


def cmd_solve(a):
    inst = load(a.instance)
    if a.algo == "cmpq":
        if not a.q:
            raise UsageError("--algo cmpq needs --q, e.g. --q 1,3")
        run = composite_on_q(inst, _parse_q(a.q, inst.levels), a.mode)
    else:
        run = {"bu": bottom_up, "td": top_down, "cmp": composite_full,
               "cmps": guaranteed_composite}[a.algo](inst, a.mode)
    lines = [f"algo {a.algo}", f"mode {a.mode}", f"cost {format_number(run.cost)}",
             f"stp_calls {run.stp_calls}"]
    if run.subset_used is not None:
        lines.append(f"subset {run.subset_used}")
    for i in range(1, inst.levels + 1):
        es = sorted(run.solution.level_edges(i))
        lines.append(f"level {i} " + " ".join(f"{inst.graph.edges[e].u}-{inst.graph.edges[e].v}" for e in es))
    _emit("\n".join(lines) + "\n", None)


def cmd_oracle(a):
    inst = load(a.instance)
    res = oracle_mlst(inst)
    lines = [f"opt {format_number(res.cost)}",
             "opt_levels " + " ".join(format_number(v) for v in res.level_opt),
             "min_levels " + " ".join(format_number(v) for v in res.mins)]
    for i in range(1, inst.levels + 1):
        es = sorted(res.solution.level_edges(i))
        lines.append(f"level {i} " + " ".join(f"{inst.graph.edges[e].u}-{inst.graph.edges[e].v}" for e in es))
    _emit("\n".join(lines) + "\n", None)


def cmd_ratio(a):
    if a.ell < 1:
        raise UsageError("--ell must be positive")
    if a.table:
        rows = ["ell,t_ell,iterations"]
        for ell in range(1, a.ell + 1):
            rep = compute_ratio(ell, a.method)
            rows.append(f"{ell},{float(rep.t_value):.6f},{rep.iterations}")
        _emit("\n".join(rows) + "\n", a.out)
        return
    rep = compute_ratio(a.ell, a.method)
    lines = [f"ell {rep.ell}", f"method {rep.method}", f"t {float(rep.t_value):.10f}",
             f"iterations {rep.iterations}", f"pool {len(rep.pool)}",
             "y " + " ".join(f"{float(v):.6g}" for v in rep.y_vector)]
    _emit("\n".join(lines) + "\n", a.out)


def cmd_emit(a):
    _emit(write_lp(emit(load(a.instance), a.form)), a.out)


def _overrides(pairs):
    out = {}
    for p in pairs or []:
        if "=" not in p:
            raise UsageError(f"--set expects key=value, got {p!r}")
        k, v = p.split("=", 1)
        out[k.strip()] = v
    return out


def cmd_experiment(a):
    text = Path(a.config).read_text(encoding="utf-8") if a.config else ""
    cfg = ex.parse_config(text, _overrides(a.set))
    rows = ex.run_experiment(cfg)
    ex.write_csv(rows, a.out)
    bad = sum(1 for r in rows if r.get("error"))
    print(f"{len(rows)} rows written to {a.out} ({bad} with errors)", file=sys.stderr)


def cmd_aggregate(a):
    rows = ex.read_csv(Path(a.csv).read_text(encoding="utf-8"))
    by = [k.strip() for k in a.by.split(",") if k.strip()]
    if not by:
        raise UsageError("--by needs at least one key")
    _emit(ex.summary_to_csv(ex.aggregate(rows, by), by), a.out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mlst", description="Multi-level Steiner tree tools")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random instance")
    g.add_argument("--model", choices=MODELS, default="er")
    g.add_argument("--n", type=int, default=20)
    g.add_argument("--ell", type=int, default=2)
    g.add_argument("--tsm", choices=TSMS, default="linear")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--eps", type=float, default=1.0)
    g.add_argument("--K", type=int, default=6)
    g.add_argument("--beta", type=float, default=0.2)
    g.add_argument("--m0", type=int, default=10)
    g.add_argument("--m", type=int, default=5)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run a heuristic on an instance file")
    s.add_argument("instance")
    s.add_argument("--algo", choices=("bu", "td", "cmpq", "cmp", "cmps"), default="cmps")
    s.add_argument("--mode", choices=MODES, default=APPROX2)
    s.add_argument("--q", help="level subset for cmpq, e.g. 1,3")
    s.set_defaults(func=cmd_solve)

    o = sub.add_parser("oracle", help="exact optimum of a micro instance by enumeration")
    o.add_argument("instance")
    o.set_defaults(func=cmd_oracle)

    r = sub.add_parser("ratio", help="approximation ratio t_ell of the composite heuristic")
    r.add_argument("--ell", type=int, required=True)
    r.add_argument("--method", choices=("full", "colgen"), default="colgen")
    r.add_argument("--table", action="store_true", help="CSV rows for every ell from 1 to --ell")
    r.add_argument("--out")
    r.set_defaults(func=cmd_ratio)

    e = sub.add_parser("emit-ilp", help="write an ILP model in LP format")
    e.add_argument("instance")
    e.add_argument("--form", choices=FORMS, default="reduced")
    e.add_argument("--out")
    e.set_defaults(func=cmd_emit)

    x = sub.add_parser("experiment", help="run a batch and write CSV")
    x.add_argument("--config")
    x.add_argument("--out", required=True)
    x.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
    x.set_defaults(func=cmd_experiment)

    ag = sub.add_parser("aggregate", help="box-plot statistics of the ratio column")
    ag.add_argument("csv")
    ag.add_argument("--by", required=True, help="comma separated grouping keys")
    ag.add_argument("--out")
    ag.set_defaults(func=cmd_aggregate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        args.func(args)
    except UsageError as exc:
        print(f"mlst: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GUARDS as exc:
        print(f"mlst: guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except DATA as exc:
        print(f"mlst: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
