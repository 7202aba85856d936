"""Batch experiments: generate instances, run heuristics, write one CSV row
per (instance, algorithm), and summarise ratios into box-plot statistics.

Config files are flat ``key = value`` text; ``#`` starts a comment.
"""
from __future__ import annotations

import csv
import hashlib
import io
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from pathlib import Path

from .heuristics import bottom_up, composite_full, guaranteed_composite, top_down
from .io import format_number
from .netgen import MODELS, TSMS, GenSpec, generate_instance
from .steiner import MODES

COLUMNS = ["model", "n", "ell", "tsm", "seed", "rep", "algo", "mode", "cost", "opt_cost",
           "ratio", "stp_calls", "runtime_ms", "error"]
ALGOS = ("bu", "td", "cmp", "cmps")
ORACLES = ("milp", "brute", "off")

RUNNERS = {"bu": bottom_up, "td": top_down, "cmp": composite_full, "cmps": guaranteed_composite}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    models: tuple[str, ...] = ("er", "ws", "ba")
    n: tuple[int, ...] = (20, 30, 40)
    ell: tuple[int, ...] = (2, 3)
    tsm: tuple[str, ...] = ("linear", "exponential")
    reps: int = 5
    algos: tuple[str, ...] = ALGOS
    mode: str = "approx2"
    oracle: str = "milp"
    master_seed: int = 2024
    workers: int = 1
    record_runtime: bool = False
    eps: float = 1.0
    K: int = 6
    beta: float = 0.2
    m0: int = 10
    m: int = 5


_LISTS = {"models": str, "n": int, "ell": int, "tsm": str, "algos": str}


def _convert(key, raw: str):
    kinds = {f.name: f.type for f in fields(ExperimentConfig)}
    if key not in kinds:
        raise ConfigError(f"unknown config key {key!r}")
    try:
        if key in _LISTS:
            items = [s.strip() for s in raw.split(",") if s.strip()]
            if not items:
                raise ConfigError(f"{key} needs at least one value")
            return tuple(_LISTS[key](s) for s in items)
        if key == "record_runtime":
            low = raw.strip().lower()
            if low not in ("true", "false", "1", "0", "yes", "no", "on", "off"):
                raise ConfigError(f"record_runtime must be a boolean, got {raw!r}")
            return low in ("true", "1", "yes", "on")
        if key in ("eps", "beta"):
            return float(raw)
        if key in ("mode", "oracle"):
            return raw.strip()
        return int(raw)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc


def parse_config(text: str, overrides: dict[str, str] | None = None) -> ExperimentConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key] = _convert(key, val)
    for key, val in (overrides or {}).items():
        values[key] = _convert(key, val)
    cfg = ExperimentConfig(**values)
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig):
    for m in cfg.models:
        if m not in MODELS:
            raise ConfigError(f"unknown model {m!r}")
    for t in cfg.tsm:
        if t not in TSMS:
            raise ConfigError(f"unknown tsm {t!r}")
    for a in cfg.algos:
        if a not in ALGOS:
            raise ConfigError(f"unknown algorithm {a!r}")
    if cfg.mode not in MODES:
        raise ConfigError(f"unknown mode {cfg.mode!r}")
    if cfg.oracle not in ORACLES:
        raise ConfigError(f"unknown oracle {cfg.oracle!r}")
    if cfg.reps < 1 or cfg.workers < 1:
        raise ConfigError("reps and workers must be positive")


def instance_seed(master: int, model: str, n: int, ell: int, tsm: str, rep: int) -> int:
    key = f"{master}|{model}|{n}|{ell}|{tsm}|{rep}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


def _tasks(cfg: ExperimentConfig):
    for model in cfg.models:
        for n in cfg.n:
            for ell in cfg.ell:
                for tsm in cfg.tsm:
                    for rep in range(cfg.reps):
                        yield (cfg, model, n, ell, tsm, rep)


def _opt_cost(instance, oracle):
    if oracle == "off":
        return None
    if oracle == "brute":
        from .oracle import oracle_mlst
        return oracle_mlst(instance).cost
    from .ilp import rooted_flow_model, solve_with_highs
    val = solve_with_highs(rooted_flow_model(instance))
    if val is None:
        raise RuntimeError("MIP solver did not reach optimality")
    # the optimum is a multiple of 1/den; snap the float onto that grid
    den = math.lcm(*(e.cost.denominator for e in instance.graph.edges))
    return Fraction(round(val * den), den)


def _run_task(task) -> list[dict]:
    cfg, model, n, ell, tsm, rep = task
    seed = instance_seed(cfg.master_seed, model, n, ell, tsm, rep)
    base = {"model": model, "n": n, "ell": ell, "tsm": tsm, "seed": seed, "rep": rep, "mode": cfg.mode}
    rows = []
    try:
        spec = GenSpec(model, n, ell, tsm, seed, eps=cfg.eps, K=cfg.K, beta=cfg.beta, m0=cfg.m0, m=cfg.m)
        inst = generate_instance(spec)
    except Exception as exc:   # recorded, the batch goes on
        return [dict(base, algo=a, error=f"generation: {exc}") for a in cfg.algos]
    opt, opt_err = None, ""
    try:
        opt = _opt_cost(inst, cfg.oracle)
    except Exception as exc:
        opt_err = f"oracle: {exc}"
    for algo in cfg.algos:
        row = dict(base, algo=algo)
        t0 = time.perf_counter()
        try:
            run = RUNNERS[algo](inst, cfg.mode)
        except Exception as exc:
            row["error"] = f"{algo}: {exc}"
            rows.append(row)
            continue
        ms = (time.perf_counter() - t0) * 1000
        row.update(cost=format_number(run.cost), stp_calls=run.stp_calls, error=opt_err)
        if cfg.record_runtime:
            row["runtime_ms"] = f"{ms:.3f}"
        if opt is not None:
            row["opt_cost"] = format_number(opt)
            row["ratio"] = f"{float(run.cost / opt):.6f}"
        rows.append(row)
    return rows


def run_experiment(cfg: ExperimentConfig) -> list[dict]:
    """All rows of the batch in (model, n, ell, tsm, rep, algo) order."""
    tasks = list(_tasks(cfg))
    if cfg.workers == 1:
        chunks = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_run_task, tasks))
    order = {a: k for k, a in enumerate(cfg.algos)}
    rows = [r for chunk in chunks for r in chunk]
    rows.sort(key=lambda r: (cfg.models.index(r["model"]), r["n"], r["ell"],
                             cfg.tsm.index(r["tsm"]), r["rep"], order[r["algo"]]))
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n", restval="")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def write_csv(rows: list[dict], path) -> None:
    Path(path).write_text(rows_to_csv(rows), encoding="utf-8")


def read_csv(text: str) -> list[dict]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise ValueError("empty CSV")
    missing = [c for c in ("ratio",) if c not in reader.fieldnames]
    if missing:
        raise ValueError(f"CSV lacks column(s) {', '.join(missing)}")
    return list(reader)


def quartiles(xs) -> tuple[float, float, float]:
    """Q1, median, Q3 with the median included in both halves when the count is odd."""
    xs = sorted(xs)
    if not xs:
        raise ValueError("no values")
    k = len(xs)
    lower = xs[:k // 2 + 1] if k % 2 else xs[:k // 2]
    upper = xs[k // 2:]
    if k == 1:
        lower = upper = xs
    return statistics.median(lower), statistics.median(xs), statistics.median(upper)


def aggregate(rows: list[dict], by: list[str]) -> list[dict]:
    """min / q1 / median / q3 / max / mean of ``ratio`` per group; rows without a ratio are skipped."""
    groups: dict[tuple, list[float]] = {}
    for r in rows:
        if any(k not in r for k in by):
            raise ValueError(f"unknown grouping key among {by}")
        if not r.get("ratio"):
            continue
        try:
            val = float(r["ratio"])
        except ValueError as exc:
            raise ValueError(f"bad ratio {r['ratio']!r}") from exc
        groups.setdefault(tuple(r[k] for k in by), []).append(val)

    def sort_key(key):
        return tuple((0, float(v)) if _is_number(v) else (1, v) for v in key)

    out = []
    for key in sorted(groups, key=sort_key):
        xs = groups[key]
        q1, med, q3 = quartiles(xs)
        out.append(dict(zip(by, key), count=len(xs), min=min(xs), q1=q1, median=med, q3=q3,
                        max=max(xs), mean=statistics.fmean(xs)))
    return out


def _is_number(s) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def summary_to_csv(summary: list[dict], by: list[str]) -> str:
    cols = list(by) + ["count", "min", "q1", "median", "q3", "max", "mean"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for s in summary:
        w.writerow([s[c] if c in by or c == "count" else f"{s[c]:.6f}" for c in cols])
    return buf.getvalue()


def default_config() -> ExperimentConfig:
    return ExperimentConfig()


def with_overrides(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    out = replace(cfg, **kw)
    _validate(out)
    return out
