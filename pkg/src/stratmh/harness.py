"""Scenario grids, a random-search comparator, and report serialization."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import statistics
import time
import warnings
from dataclasses import asdict, dataclass, field, replace
from typing import IO, Sequence

import numpy as np

from .heuristic import (HeuristicParams, RunResult, Problem, best_of, construct_solution,
                        make_rng, run_parallel)
from .oracle import OracleLimits, brute_force_optimum
from .population import Population, PopulationError, distinct_values, load_population
from .strata import count_solutions

_U64 = 1 << 64
SIG_DIGITS = 9
RESULT_FIELDS = ("xbest", "bk", "Nh", "nh", "Sh2", "fobj", "cv", "ta", "ibest")


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    inputs: list[str] = field(default_factory=list)
    column: str | int | None = None
    L_list: list[int] = field(default_factory=lambda: [3, 4, 5, 6, 7])
    cvt_list: list[float] = field(default_factory=lambda: [0.03, 0.05, 0.075, 0.10])
    params: HeuristicParams = field(default_factory=HeuristicParams)
    npar: int = 1
    runs_per_cell: int = 10
    oracle: bool = False
    oracle_limits: OracleLimits = field(default_factory=OracleLimits)
    baseline_budget: int = 1000
    output_format: str = "json"
    record_timing: bool = True
    workers: int = 1

    def __post_init__(self):
        if not self.L_list or not self.cvt_list:
            raise ConfigError("L and cvt lists must be non-empty")
        if any(L < 2 for L in self.L_list):
            raise ConfigError("every L must be >= 2")
        if any(not 0 < c < 1 for c in self.cvt_list):
            raise ConfigError("target cv values must lie in (0, 1)")
        if self.npar < 1 or self.runs_per_cell < 1:
            raise ConfigError("npar and runs_per_cell must be positive")
        if self.baseline_budget < 0:
            raise ConfigError("baseline budget cannot be negative")
        if self.output_format not in ("json", "csv"):
            raise ConfigError(f"unknown output format {self.output_format!r}")


@dataclass
class CellResult:
    population: str
    L: int
    cvt: float
    best: RunResult | None = None
    runs: list[RunResult] = field(default_factory=list)
    oracle: RunResult | None = None
    oracle_note: str | None = None
    baseline: RunResult | None = None
    error: str | None = None

    @property
    def eff_baseline(self) -> float | None:
        if self.best is None or self.baseline is None:
            return None
        return efficiency_ratio(self.baseline.fobj, self.best.fobj)

    @property
    def eff_oracle(self) -> float | None:
        """Heuristic size over the optimum; >= 1 by construction."""
        if self.best is None or self.oracle is None:
            return None
        return efficiency_ratio(self.best.fobj, self.oracle.fobj)


@dataclass
class ScenarioReport:
    config: ScenarioConfig
    cells: list[CellResult]

    @property
    def failed(self) -> list[CellResult]:
        return [c for c in self.cells if c.error is not None]

    def summary(self) -> dict:
        effs = [c.eff_baseline for c in self.cells if c.eff_baseline is not None]
        return {
            "cells": len(self.cells),
            "failed": len(self.failed),
            "median_eff_baseline": statistics.median(effs) if effs else None,
            "oracle_matches": sum(1 for c in self.cells
                                  if c.oracle is not None and c.best is not None
                                  and c.best.fobj == c.oracle.fobj),
            "oracle_cells": sum(1 for c in self.cells if c.oracle is not None),
        }


def efficiency_ratio(n_other: int, n_stratmh: int) -> float:
    if n_other < 1 or n_stratmh < 1:
        raise ValueError("sample sizes must be positive")
    return n_other / n_stratmh


def random_search_baseline(pop: Population, L: int, cvt: float, budget: int,
                           seed: int) -> RunResult:
    """Best of ``budget`` independent random stratifications, exactly allocated at the end."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    t0 = time.perf_counter()
    problem = Problem(pop, L, cvt)
    rng = make_rng(seed)
    best = None
    ibest = 0
    for k in range(1, budget + 1):
        s = problem.score(construct_solution(rng, problem.B, L))
        if best is None or s < best:
            best, ibest = s, k
    return problem.finish(best[2], time.perf_counter() - t0, ibest, budget, seed)


def _cell_seed(root: int, *key: int) -> int:
    ss = np.random.SeedSequence(entropy=root, spawn_key=key)
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _run_cell(name: str, pi: int, pop: Population, L: int, ci: int, cvt: float,
              cfg: ScenarioConfig) -> CellResult:
    cell = CellResult(population=name, L=L, cvt=cvt)
    try:
        Problem(pop, L, cvt)
    except (PopulationError, ValueError) as exc:
        cell.error = f"{type(exc).__name__}: {exc}"
        return cell
    base = _cell_seed(cfg.params.seed, pi, L, ci)
    for r in range(cfg.runs_per_cell):
        params = replace(cfg.params, seed=(base + r * cfg.npar) % _U64)
        cell.runs.append(run_parallel(pop, L, cvt, params, cfg.npar, cfg.workers))
    cell.best = best_of(cell.runs)
    if cfg.oracle:
        ts = count_solutions(distinct_values(pop).size, L)
        if ts <= cfg.oracle_limits.max_ts:
            cell.oracle = brute_force_optimum(pop, L, cvt, cfg.oracle_limits, cfg.workers)
        else:
            cell.oracle_note = f"skipped: {ts} solutions exceed limit {cfg.oracle_limits.max_ts}"
    if cfg.baseline_budget:
        cell.baseline = random_search_baseline(pop, L, cvt, cfg.baseline_budget,
                                               _cell_seed(cfg.params.seed, pi, L, ci, 1))
    return cell


def load_inputs(cfg: ScenarioConfig) -> list[tuple[str, Population]]:
    out = []
    for path in cfg.inputs:
        try:
            out.append((os.path.basename(path), load_population(path, cfg.column)))
        except (OSError, PopulationError) as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return out


def run_scenarios(cfg: ScenarioConfig,
                  populations: Sequence[tuple[str, Population]] | None = None) -> ScenarioReport:
    """Run every (population, L, cvt) cell; cells come back ordered by that triple."""
    pops = list(populations) if populations is not None else load_inputs(cfg)
    if not pops:
        raise ConfigError("no input populations")
    cells = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for pi, (name, pop) in enumerate(pops):
            for L in cfg.L_list:
                for ci, cvt in enumerate(cfg.cvt_list):
                    cells.append(_run_cell(name, pi, pop, L, ci, cvt, cfg))
    return ScenarioReport(config=cfg, cells=cells)


# -- serialization ---------------------------------------------------------

def _num(x):
    if isinstance(x, float):
        return float(format(x, f".{SIG_DIGITS}g")) if math.isfinite(x) else None
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    return x


def _result_dict(r: RunResult, timing: bool) -> dict:
    d = {k: _num(getattr(r, k)) for k in RESULT_FIELDS}
    d["xbest"] = list(r.xbest)
    if not timing:
        d["ta"] = None
    d["seed"] = r.seed
    d["generations_run"] = r.generations_run
    return d


def _cell_dict(c: CellResult, cfg: ScenarioConfig) -> dict:
    d = {"population": c.population, "L": c.L, "cvt": _num(c.cvt)}
    if c.error is not None:
        d["error"] = c.error
        return d
    timing = cfg.record_timing
    d.update(_result_dict(c.best, timing))
    d["rng"] = c.best.rng
    d["params"] = _params_dict(cfg)
    d["runs"] = [_result_dict(r, timing) for r in c.runs]
    d["oracle"] = _result_dict(c.oracle, timing) if c.oracle else None
    if c.oracle_note:
        d["oracle_note"] = c.oracle_note
    d["baseline"] = _result_dict(c.baseline, timing) if c.baseline else None
    d["eff_baseline"] = _num(c.eff_baseline)
    d["eff_oracle"] = _num(c.eff_oracle)
    return d


def _params_dict(cfg: ScenarioConfig) -> dict:
    d = asdict(cfg.params)
    d.update(npar=cfg.npar, runs=cfg.runs_per_cell, baseline_budget=cfg.baseline_budget)
    return _num_dict(d)


def _num_dict(d: dict) -> dict:
    return {k: _num(v) for k, v in d.items()}


def report_to_json(report: ScenarioReport) -> str:
    cfg = report.config
    doc = {
        "meta": {
            "inputs": list(cfg.inputs),
            "L": list(cfg.L_list),
            "cvt": _num(list(cfg.cvt_list)),
            "params": _params_dict(cfg),
            "oracle": cfg.oracle,
        },
        "summary": _num_dict(report.summary()),
        "cells": [_cell_dict(c, cfg) for c in report.cells],
    }
    return json.dumps(doc, indent=2) + "\n"


CSV_COLUMNS = ("population", "L", "cvt", "method", "run", "seed", "xbest", "bk", "Nh", "nh",
               "Sh2", "fobj", "cv", "ta", "ibest", "generations_run", "error")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (list, tuple)):
        return ";".join(_fmt(v) for v in x)
    if isinstance(x, float):
        return format(x, f".{SIG_DIGITS}g")
    return str(x)


def report_to_csv(report: ScenarioReport) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(CSV_COLUMNS)
    timing = report.config.record_timing

    def row(c: CellResult, method: str, run, r: RunResult | None, error=None):
        vals = [c.population, c.L, c.cvt, method, run]
        if r is None:
            vals += [None] * 11
        else:
            vals += [r.seed, r.xbest, r.bk, r.Nh, r.nh, r.Sh2, r.fobj, r.cv,
                     r.ta if timing else None, r.ibest, r.generations_run]
        wr.writerow([_fmt(v) for v in vals] + [error or ""])

    for c in report.cells:
        if c.error is not None:
            row(c, "stratmh", None, None, c.error)
            continue
        for k, r in enumerate(c.runs):
            row(c, "stratmh", k, r)
        if c.oracle is not None:
            row(c, "oracle", 0, c.oracle)
        if c.baseline is not None:
            row(c, "baseline", 0, c.baseline)
    return buf.getvalue()


def emit_report(report: ScenarioReport, fmt: str = "json",
                destination: str | os.PathLike | IO[str] | None = None) -> str:
    """Serialize ``report`` and write it to a path or stream (if given); returns the text."""
    text = report_to_json(report) if fmt == "json" else report_to_csv(report) if fmt == "csv" else None
    if text is None:
        raise ValueError(f"unknown report format {fmt!r}")
    if destination is None:
        return text
    if isinstance(destination, (str, os.PathLike)):
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        destination.write(text)
    return text
