"""Stratifications over the distinct-value set and the estimator they induce.

A stratification is a composition ``w`` of ``|B|`` into ``L`` parts, each part
being the number of consecutive distinct values in that stratum. Every part
must be at least 2 so each stratum has a positive variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .population import DistinctSet, Population

Solution = tuple[int, ...]


class InvalidSolution(ValueError):
    pass


@dataclass(frozen=True)
class StrataSummary:
    boundaries: tuple[float, ...]
    Nh: tuple[int, ...]
    Sh2: tuple[float, ...]
    total: float

    @property
    def L(self) -> int:
        return len(self.Nh)

    @classmethod
    def from_stats(cls, Nh: Sequence[int], Sh2: Sequence[float], total: float,
                   boundaries: Sequence[float] = ()) -> "StrataSummary":
        """Build a summary directly from per-stratum statistics (no population needed)."""
        if len(Nh) != len(Sh2):
            raise ValueError("Nh and Sh2 must have the same length")
        return cls(boundaries=tuple(float(b) for b in boundaries),
                   Nh=tuple(int(n) for n in Nh),
                   Sh2=tuple(float(s) for s in Sh2),
                   total=float(total))


def check_solution(w: Sequence[int], B_size: int) -> None:
    if sum(w) != B_size:
        raise InvalidSolution(f"parts of {tuple(w)} sum to {sum(w)}, expected {B_size}")
    if any(x < 2 for x in w):
        raise InvalidSolution(f"every part of {tuple(w)} must be >= 2")


def stratum_variance(total: float, sumsq: float, Nh: int) -> float:
    """Population variance (divisor ``Nh - 1``) from raw first and second moments."""
    if Nh < 2:
        raise ValueError(f"stratum variance needs at least 2 units, got {Nh}")
    v = (sumsq - total * total / Nh) / (Nh - 1)
    return v if v > 0.0 else 0.0


def summarize(pop: Population, ds: DistinctSet, w: Sequence[int]) -> StrataSummary:
    check_solution(w, ds.size)
    Nh = []
    Sh2 = []
    bounds = []
    start = 0
    for h, width in enumerate(w):
        stop = start + width
        n, s, ss = ds.run_moments(start, stop)
        Nh.append(n)
        Sh2.append(stratum_variance(s, ss, n))
        if h < len(w) - 1:
            bounds.append(float(ds.distinct[stop - 1]))
        start = stop
    return StrataSummary(boundaries=tuple(bounds), Nh=tuple(Nh), Sh2=tuple(Sh2),
                         total=pop.total)


def _check_sizes(ss: StrataSummary, nh: Sequence[int]) -> None:
    if len(nh) != ss.L:
        raise ValueError(f"allocation has {len(nh)} entries for {ss.L} strata")
    for n, N in zip(nh, ss.Nh):
        if not 2 <= n <= N:
            raise ValueError(f"stratum sample size {n} outside [2, {N}]")


def _variance(Nh: Sequence[int], Sh2: Sequence[float], nh: Sequence[float]) -> float:
    # Single shared evaluation so every caller compares bit-identical values.
    v = 0.0
    for N, S2, n in zip(Nh, Sh2, nh):
        v += N * N * S2 / n * (1.0 - n / N)
    return v if v > 0.0 else 0.0


def estimator_variance(ss: StrataSummary, nh: Sequence[int]) -> float:
    """Variance of the stratified total estimator under SRS without replacement."""
    _check_sizes(ss, nh)
    return _variance(ss.Nh, ss.Sh2, nh)


def estimator_cv(ss: StrataSummary, nh: Sequence[int]) -> float:
    if ss.total == 0:
        raise ValueError("coefficient of variation undefined for a zero total")
    return math.sqrt(estimator_variance(ss, nh)) / abs(ss.total)


def count_solutions(B_size: int, L: int) -> int:
    """Number of compositions of ``B_size`` into ``L`` parts that are all >= 2."""
    if L < 1 or B_size < 2 * L:
        raise ValueError(f"no stratification of {B_size} distinct values into {L} strata")
    return math.comb(B_size - L - 1, L - 1)
