"""Brute-force ground truth for small instances.

Nothing here is clever on purpose: every composition is enumerated and every
allocation grid point is scanned, so these routines can check the heuristic
and the exact allocator independently.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator

from .allocation import Allocation, exact_min_allocation
from .heuristic import RunResult
from .population import Population, distinct_values, validate_for_stratification
from .strata import Solution, StrataSummary, _variance, count_solutions, summarize


class OracleLimitError(ValueError):
    pass


@dataclass(frozen=True)
class OracleLimits:
    max_ts: int = 10**7
    max_alloc_grid: int = 12

    def __post_init__(self):
        if self.max_ts <= 0 or self.max_alloc_grid <= 0:
            raise ValueError("oracle limits must be positive")


def _compositions(total: int, parts: int) -> Iterator[Solution]:
    if parts == 1:
        yield (total,)
        return
    for first in range(2, total - 2 * (parts - 1) + 1):
        for tail in _compositions(total - first, parts - 1):
            yield (first,) + tail


def enumerate_solutions(B_size: int, L: int, limits: OracleLimits | None = None) -> Iterator[Solution]:
    """Every composition of ``B_size`` into ``L`` parts >= 2, in lexicographic order."""
    limits = limits or OracleLimits()
    ts = count_solutions(B_size, L)
    if ts > limits.max_ts:
        raise OracleLimitError(f"{ts} solutions exceed the enumeration limit {limits.max_ts}")
    return _compositions(B_size, L)


def _best_in_chunk(args) -> tuple[int, float, Solution]:
    pop, L, cvt, firsts = args
    ds = distinct_values(pop)
    best = None
    for first in firsts:
        for tail in _compositions(ds.size - first, L - 1):
            w = (first,) + tail
            a = exact_min_allocation(summarize(pop, ds, w), cvt)
            key = (a.n, a.cv, w)
            if best is None or key < best:
                best = key
    return best


def brute_force_optimum(pop: Population, L: int, cvt: float,
                        limits: OracleLimits | None = None, workers: int = 1) -> RunResult:
    """Global minimizer of the exact sample size over all stratifications.

    With ``workers > 1`` the enumeration is split by the first part and the
    per-chunk minima are reduced under the same (n, cv, w) order.
    """
    t0 = time.perf_counter()
    limits = limits or OracleLimits()
    ds = distinct_values(pop)
    validate_for_stratification(pop, ds, L)
    ts = count_solutions(ds.size, L)
    if ts > limits.max_ts:
        raise OracleLimitError(f"{ts} solutions exceed the enumeration limit {limits.max_ts}")
    firsts = list(range(2, ds.size - 2 * (L - 1) + 1))
    if workers > 1 and len(firsts) > 1:
        chunks = [firsts[k::workers] for k in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            best = min(b for b in ex.map(_best_in_chunk, [(pop, L, cvt, c) for c in chunks if c]))
    else:
        best = _best_in_chunk((pop, L, cvt, firsts))
    w = best[2]
    ss = summarize(pop, ds, w)
    a = exact_min_allocation(ss, cvt)
    return RunResult(xbest=w, bk=ss.boundaries, Nh=ss.Nh, nh=a.nh, Sh2=ss.Sh2, fobj=a.n,
                     cv=a.cv, ta=time.perf_counter() - t0, ibest=0, generations_run=0,
                     seed=0, rng="none")


def brute_force_allocation(ss: StrataSummary, cvt: float,
                           limits: OracleLimits | None = None) -> Allocation:
    """Scan every integer vector in the box ``[2, Nh]`` for the cheapest feasible one."""
    limits = limits or OracleLimits()
    if ss.L > 4:
        raise OracleLimitError("allocation grid scan supports at most 4 strata")
    if any(N > limits.max_alloc_grid for N in ss.Nh):
        raise OracleLimitError(f"stratum sizes {ss.Nh} exceed grid cap {limits.max_alloc_grid}")
    budget = (cvt * ss.total) ** 2
    best = None
    for nh in itertools.product(*(range(2, N + 1) for N in ss.Nh)):
        v = _variance(ss.Nh, ss.Sh2, nh)
        if v <= budget:
            key = (sum(nh), v, nh)
            if best is None or key < best:
                best = key
    n, v, nh = best
    return Allocation(nh=nh, n=n, cv=v ** 0.5 / abs(ss.total), exact=True)
