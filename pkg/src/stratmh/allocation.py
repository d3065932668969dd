"""Sample allocation for a fixed stratification.

Two routes produce an integer allocation that meets a target coefficient of
variation:

* the fast route evaluates the Neyman minimum ``n``, splits it in proportion to
  ``Nh * Sh``, rounds and clamps, and keeps the result only if it is feasible;
* the exact route solves ``min sum(nh)`` s.t. ``V(nh) <= (cvt * T)**2`` and
  ``2 <= nh <= Nh`` by marginal allocation. Each term of ``V`` is convex and
  decreasing in ``nh``, so adding units in order of largest variance reduction
  gives, for every total ``n``, the smallest achievable ``V``; the first
  feasible total is optimal.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Literal, Sequence

from .population import DistinctSet, Population
from .strata import Solution, StrataSummary, _variance, summarize

Mode = Literal["fast", "exact"]


@dataclass(frozen=True)
class Allocation:
    nh: tuple[int, ...]
    n: int
    cv: float
    exact: bool


def _budget(ss: StrataSummary, cvt: float) -> float:
    b = cvt * ss.total
    return b * b


def _cv(ss: StrataSummary, nh: Sequence[float]) -> float:
    return math.sqrt(_variance(ss.Nh, ss.Sh2, nh)) / abs(ss.total)


def continuous_cv(ss: StrataSummary, nh: Sequence[float]) -> float:
    """Coefficient of variation for a possibly fractional allocation (no bound checks)."""
    return _cv(ss, nh)


def neyman_min_n(ss: StrataSummary, cvt: float) -> float:
    """Smallest total that reaches ``cvt`` under a continuous Neyman split."""
    if cvt <= 0:
        raise ValueError("target cv must be positive")
    if ss.total == 0:
        raise ValueError("target cv undefined for a zero total")
    a = math.fsum(N * math.sqrt(S2) for N, S2 in zip(ss.Nh, ss.Sh2))
    fpc = math.fsum(N * S2 for N, S2 in zip(ss.Nh, ss.Sh2))
    return a * a / (cvt * cvt * ss.total * ss.total + fpc)


def neyman_allocate(ss: StrataSummary, n: float) -> list[float]:
    weights = [N * math.sqrt(S2) for N, S2 in zip(ss.Nh, ss.Sh2)]
    tot = math.fsum(weights)
    if tot == 0:
        raise ValueError("all strata have zero variance")
    return [n * wt / tot for wt in weights]


def _round_half_away(x: float) -> int:
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def round_and_clamp(nh_real: Sequence[float], Nh: Sequence[int]) -> tuple[int, ...]:
    if len(nh_real) != len(Nh):
        raise ValueError("length mismatch")
    return tuple(min(max(_round_half_away(x), 2), N) for x, N in zip(nh_real, Nh))


def _gain(c: float, k: int) -> float:
    # Variance reduction of moving one stratum from k to k + 1 units;
    # c / (k (k+1)) equals c (1/k - 1/(k+1)) and is monotone in k in floating point.
    return c / (k * (k + 1))


def _threshold_state(coef: list[float], Nh: Sequence[int], lam: float) -> list[int]:
    """Allocation holding every increment whose gain is >= ``lam``."""
    out = []
    for c, N in zip(coef, Nh):
        if c <= 0.0:
            out.append(2)
            continue
        k = int((-1.0 + math.sqrt(1.0 + 4.0 * c / lam)) / 2.0) + 1
        k = min(max(k, 2), N)
        while k > 2 and _gain(c, k - 1) < lam:
            k -= 1
        while k < N and _gain(c, k) >= lam:
            k += 1
        out.append(k)
    return out


def _greedy(ss: StrataSummary, budget: float, nh: list[int]) -> list[int]:
    Nh, Sh2 = ss.Nh, ss.Sh2
    coef = [N * N * S2 for N, S2 in zip(Nh, Sh2)]
    heap = [(-_gain(c, k), h) for h, (c, k, N) in enumerate(zip(coef, nh, Nh)) if k < N]
    heapq.heapify(heap)
    while _variance(Nh, Sh2, nh) > budget and heap:
        _, h = heapq.heappop(heap)
        nh[h] += 1
        if nh[h] < Nh[h]:
            heapq.heappush(heap, (-_gain(coef[h], nh[h]), h))
    return nh


def marginal_allocation(ss: StrataSummary, cvt: float) -> list[int]:
    """Plain marginal allocation from the all-2 start; reference for the warm-started variant."""
    return _greedy(ss, _budget(ss, cvt), [2] * ss.L)


def exact_min_allocation(ss: StrataSummary, cvt: float) -> Allocation:
    """Minimum total sample size meeting ``cvt`` with ``2 <= nh <= Nh``.

    Runs marginal allocation but first jumps, by bisection on the gain
    threshold, to the last infeasible state the unit-by-unit greedy would pass
    through. Every state of the form "all increments with gain >= lam" is a
    prefix of the greedy sequence, so the result is identical to the plain
    greedy while skipping most of its steps.
    """
    if cvt < 0:
        raise ValueError("target cv must be non-negative")
    Nh, Sh2 = ss.Nh, ss.Sh2
    for N in Nh:
        if N < 2:
            raise ValueError("every stratum needs at least 2 units")
    budget = _budget(ss, cvt)
    start = [2] * ss.L
    if _variance(Nh, Sh2, start) > budget:
        coef = [N * N * S2 for N, S2 in zip(Nh, Sh2)]
        hi = max(_gain(c, 2) for c in coef)
        lo = min((_gain(c, N - 1) for c, N in zip(coef, Nh) if c > 0 and N > 2), default=hi)
        # threshold state at hi is a greedy prefix; at lo (<= every gain) it is the census
        hi_state = _threshold_state(coef, Nh, hi)
        if _variance(Nh, Sh2, hi_state) > budget:
            lo_n = sum(Nh)
            for _ in range(200):
                if lo_n - sum(hi_state) <= 2 * ss.L:
                    break
                mid = math.sqrt(lo * hi)
                if not lo < mid < hi:
                    break
                state = _threshold_state(coef, Nh, mid)
                if _variance(Nh, Sh2, state) > budget:
                    hi, hi_state = mid, state
                else:
                    lo, lo_n = mid, sum(state)
            start = hi_state
        nh = _greedy(ss, budget, start)
    else:
        nh = start
    return Allocation(nh=tuple(nh), n=sum(nh), cv=_cv(ss, nh), exact=True)


def allocate(ss: StrataSummary, cvt: float, mode: Mode = "fast") -> Allocation:
    """Allocation for a summarized stratification; ``fast`` falls back to exact if infeasible."""
    if mode == "exact":
        return exact_min_allocation(ss, cvt)
    if mode != "fast":
        raise ValueError(f"unknown allocation mode {mode!r}")
    if cvt > 0:
        nh = round_and_clamp(neyman_allocate(ss, neyman_min_n(ss, cvt)), ss.Nh)
        if _variance(ss.Nh, ss.Sh2, nh) <= _budget(ss, cvt):
            return Allocation(nh=nh, n=sum(nh), cv=_cv(ss, nh), exact=False)
    return exact_min_allocation(ss, cvt)


def allocate_for_solution(pop: Population, ds: DistinctSet, w: Solution, cvt: float,
                          mode: Mode = "fast") -> Allocation:
    return allocate(summarize(pop, ds, w), cvt, mode)
