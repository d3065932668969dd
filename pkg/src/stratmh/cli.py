"""Command-line entry point: run a scenario grid and write the report."""

from __future__ import annotations

import argparse
import logging
import sys

from .harness import ConfigError, ScenarioConfig, emit_report, run_scenarios
from .heuristic import HeuristicParams
from .oracle import OracleLimits

log = logging.getLogger("stratmh")


def _int_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            a, b = part.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return out


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _column(text: str) -> str | int:
    return int(text) if text.lstrip("-").isdigit() else text


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="stratmh",
        description="Minimum-sample-size univariate stratification over a grid of "
                    "strata counts and target coefficients of variation.")
    ap.add_argument("--input", action="append", required=True, metavar="PATH",
                    help="population file (repeatable); one value per line unless --column")
    ap.add_argument("--column", type=_column, default=None, metavar="NAME|INDEX",
                    help="read inputs as CSV and take this column")
    ap.add_argument("--L", dest="L", type=_int_list, default=[3, 4, 5, 6, 7], metavar="LIST",
                    help="strata counts, e.g. 3,4,5 or 3-7 (default 3-7)")
    ap.add_argument("--cvt", type=_float_list, default=[0.03, 0.05, 0.075, 0.10], metavar="LIST",
                    help="target cvs (default 0.03,0.05,0.075,0.1)")
    ap.add_argument("--p", type=int, default=50, help="solutions per generation")
    ap.add_argument("--pe", type=float, default=0.3, help="elite fraction")
    ap.add_argument("--pm", type=float, default=0.3, help="mutant fraction")
    ap.add_argument("--maxgen", type=int, default=50, help="maximum generations")
    ap.add_argument("--npar", type=int, default=1, help="independent replicas per run")
    ap.add_argument("--workers", type=int, default=1, help="worker processes for replicas")
    ap.add_argument("--runs", type=int, default=10, help="runs per cell")
    ap.add_argument("--seed", type=int, default=0, help="root seed (unsigned 64-bit)")
    ap.add_argument("--oracle", action="store_true",
                    help="also enumerate all stratifications when small enough")
    ap.add_argument("--oracle-max-ts", type=int, default=10**7, help="enumeration limit")
    ap.add_argument("--baseline-budget", type=int, default=1000,
                    help="random-search evaluations per cell (0 disables)")
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    ap.add_argument("--out", default=None, metavar="PATH", help="output file (default stdout)")
    ap.add_argument("--no-timing", action="store_true",
                    help="omit run times so reports are byte-reproducible")
    ap.add_argument("--strict", action="store_true",
                    help="exit with status 2 if any cell failed validation")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = ScenarioConfig(
            inputs=args.input, column=args.column, L_list=args.L, cvt_list=args.cvt,
            params=HeuristicParams(p=args.p, pe_frac=args.pe, pm_frac=args.pm,
                                   max_gen=args.maxgen, seed=args.seed),
            npar=args.npar, runs_per_cell=args.runs, oracle=args.oracle,
            oracle_limits=OracleLimits(max_ts=args.oracle_max_ts),
            baseline_budget=args.baseline_budget, output_format=args.format,
            record_timing=not args.no_timing, workers=args.workers)
        report = run_scenarios(cfg)
        emit_report(report, args.format, args.out if args.out else sys.stdout)
    except (ConfigError, ValueError) as exc:
        print(f"stratmh: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"stratmh: cannot write report: {exc}", file=sys.stderr)
        return 1
    for cell in report.failed:
        log.warning("%s L=%d cvt=%g: %s", cell.population, cell.L, cell.cvt, cell.error)
    if args.strict and report.failed:
        return 2
    return 0
