"""Biased random-key style search over stratifications.

Each generation keeps its elite, injects freshly constructed mutants, and fills
the rest with crossover offspring of (elite, non-elite) pairs. Candidates are
scored by the fast allocation; the incumbent gets an exact allocation at the
end so the reported sample size is optimal for the returned boundaries.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Sequence

import numpy as np

from .allocation import allocate, exact_min_allocation
from .population import DistinctSet, Population, distinct_values, validate_for_stratification
from .strata import Solution, StrataSummary, summarize

RNG_ALGORITHM = "numpy.PCG64"
_U64 = 1 << 64

Scored = tuple[int, float, Solution]


@dataclass(frozen=True)
class HeuristicParams:
    p: int = 50
    pe_frac: float = 0.3
    pm_frac: float = 0.3
    max_gen: int = 50
    stall_frac: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.p < 4:
            raise ValueError("p must be at least 4")
        if not (0 < self.pe_frac < 1 and 0 < self.pm_frac < 1):
            raise ValueError("pe_frac and pm_frac must lie in (0, 1)")
        if self.pe_frac + self.pm_frac >= 1:
            raise ValueError("pe_frac + pm_frac must be below 1")
        if self.max_gen < 1:
            raise ValueError("max_gen must be positive")
        if self.stall_frac <= 0:
            raise ValueError("stall_frac must be positive")
        if not 0 <= self.seed < _U64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        pe, pm, _ = self.sizes()
        if pe < 1 or pm < 1:
            raise ValueError("elite and mutant sets must each hold at least one solution")

    def sizes(self) -> tuple[int, int, int]:
        """(elite, mutant, crossover) counts; the crossover count is kept even."""
        pe = _round_half_up(self.pe_frac * self.p)
        pm = _round_half_up(self.pm_frac * self.p)
        if (self.p - pe - pm) % 2:
            pm -= 1
        return pe, pm, self.p - pe - pm

    @property
    def stall_limit(self) -> int:
        return math.ceil(self.stall_frac * self.max_gen)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class RunResult:
    xbest: Solution
    bk: tuple[float, ...]
    Nh: tuple[int, ...]
    nh: tuple[int, ...]
    Sh2: tuple[float, ...]
    fobj: int
    cv: float
    ta: float
    ibest: int
    generations_run: int
    seed: int
    rng: str = RNG_ALGORITHM

    @property
    def key(self) -> tuple[int, float, Solution]:
        return (self.fobj, self.cv, self.xbest)

    def to_dict(self) -> dict:
        return asdict(self)


class Problem:
    """A population, a strata count and a target cv, with cached fitness."""

    def __init__(self, pop: Population, L: int, cvt: float, ds: DistinctSet | None = None):
        self.pop = pop
        self.ds = ds if ds is not None else distinct_values(pop)
        validate_for_stratification(pop, self.ds, L)
        if cvt < 0:
            raise ValueError("target cv must be non-negative")
        self.L = L
        self.cvt = cvt
        self.B = self.ds.size
        self._cache: dict[Solution, tuple[int, float]] = {}
        self.evaluations = 0

    def summary(self, w: Solution) -> StrataSummary:
        return summarize(self.pop, self.ds, w)

    def evaluate(self, w: Solution) -> tuple[int, float]:
        """Fitness ``(n, cv)`` from the fast allocation (exact fallback when infeasible)."""
        hit = self._cache.get(w)
        if hit is None:
            if len(w) != self.L:
                raise ValueError(f"solution {w} does not have {self.L} strata")
            a = allocate(self.summary(w), self.cvt, "fast")
            hit = self._cache[w] = (a.n, a.cv)
            self.evaluations += 1
        return hit

    def score(self, w: Solution) -> Scored:
        n, cv = self.evaluate(w)
        return (n, cv, w)

    def finish(self, w: Solution, ta: float, ibest: int, generations: int, seed: int) -> RunResult:
        ss = self.summary(w)
        a = exact_min_allocation(ss, self.cvt)
        return RunResult(xbest=w, bk=ss.boundaries, Nh=ss.Nh, nh=a.nh, Sh2=ss.Sh2,
                         fobj=a.n, cv=a.cv, ta=ta, ibest=ibest,
                         generations_run=generations, seed=seed)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def construct_solution(rng: np.random.Generator, B_size: int, L: int) -> Solution:
    """Draw each part uniformly among values that leave room for the remaining strata."""
    if L < 1 or B_size < 2 * L:
        raise ValueError(f"cannot split {B_size} distinct values into {L} strata")
    w = []
    left = B_size
    for h in range(1, L):
        top = left - 2 * (L - h)
        x = int(rng.integers(2, top + 1))
        w.append(x)
        left -= x
    w.append(left)
    return tuple(w)


def partition_elite(scored: Sequence[Scored], p_e: int) -> tuple[list[Scored], list[Scored]]:
    ranked = sorted(scored)
    return ranked[:p_e], ranked[p_e:]


def _apportion(amount: int, weights: Sequence[int]) -> list[int]:
    """Largest-remainder split of ``amount`` units proportional to ``weights``."""
    total = sum(weights)
    shares = [amount * wt // total for wt in weights]
    rest = amount - sum(shares)
    # remainder of amount*wt/total is (amount*wt mod total)/total; exact integer ordering
    order = sorted(range(len(weights)), key=lambda j: (-(amount * weights[j] % total), j))
    for j in order[:rest]:
        shares[j] += 1
    return shares


def _rebalance(w: list[int], i: int, delta: int) -> Solution:
    """Remove ``delta`` units (add if negative) from every position except ``i``."""
    others = [j for j in range(len(w)) if j != i]
    if not others or delta == 0:
        return tuple(w)
    shares = _apportion(abs(delta), [w[j] for j in others])
    if delta < 0:
        for j, s in zip(others, shares):
            w[j] += s
        return tuple(w)
    excess = 0
    for j, s in zip(others, shares):
        w[j] -= s
        if w[j] < 2:
            excess += 2 - w[j]
            w[j] = 2
    while excess:
        j = max(others, key=lambda k: (w[k], -k))
        take = min(excess, w[j] - 2)
        if take <= 0:
            raise AssertionError("rebalance ran out of room")
        w[j] -= take
        excess -= take
    return tuple(w)


def crossover_candidates(we: Solution, wne: Solution) -> list[Solution]:
    """The 2L vectors obtained by swapping each position and redistributing the difference."""
    out = []
    for i in range(len(we)):
        w1 = list(we)
        w2 = list(wne)
        w1[i], w2[i] = wne[i], we[i]
        out.append(_rebalance(w1, i, wne[i] - we[i]))
        out.append(_rebalance(w2, i, we[i] - wne[i]))
    return out


def crossover(we: Solution, wne: Solution, problem: Problem) -> tuple[Solution, Solution]:
    if len(we) != len(wne) or sum(we) != sum(wne):
        raise ValueError("crossover parents must share L and |B|")
    best = sorted(problem.score(w) for w in crossover_candidates(we, wne))
    return best[0][2], best[1][2]


def mutate(rng: np.random.Generator, count: int, problem: Problem) -> list[Solution]:
    return [construct_solution(rng, problem.B, problem.L) for _ in range(count)]


def search(problem: Problem, params: HeuristicParams, trace: list | None = None) -> RunResult:
    """Run the generation loop on a prepared :class:`Problem`.

    If ``trace`` is a list, the incumbent key after every generation is appended.
    """
    t0 = time.perf_counter()
    rng = make_rng(params.seed)
    p_e, p_m, p_c = params.sizes()
    W = mutate(rng, params.p, problem)
    incumbent: Scored | None = None
    ibest = 0
    stall = 0
    gen = 0
    for gen in range(1, params.max_gen + 1):
        scored = [problem.score(w) for w in W]
        elite, rest = partition_elite(scored, p_e)
        if incumbent is None or elite[0] < incumbent:
            improved = incumbent is None or elite[0][0] < incumbent[0]
            incumbent = elite[0]
            ibest = gen
        else:
            improved = False
        stall = 0 if improved else stall + 1
        if trace is not None:
            trace.append(incumbent)
        if gen == params.max_gen or stall >= params.stall_limit:
            break
        W = [s[2] for s in elite]
        W += mutate(rng, p_m, problem)
        for _ in range(p_c // 2):
            we = elite[int(rng.integers(len(elite)))][2]
            wne = rest[int(rng.integers(len(rest)))][2]
            W.extend(crossover(we, wne, problem))
    ta = time.perf_counter() - t0
    return problem.finish(incumbent[2], ta, ibest, gen, params.seed)


def run_stratmh(pop: Population, L: int, cvt: float,
                params: HeuristicParams | None = None) -> RunResult:
    params = params or HeuristicParams()
    problem = Problem(pop, L, cvt)
    return search(problem, params)


def _replica(args) -> RunResult:
    pop, L, cvt, params = args
    return run_stratmh(pop, L, cvt, params)


def replica_params(params: HeuristicParams, npar: int) -> list[HeuristicParams]:
    return [replace(params, seed=(params.seed + r) % _U64) for r in range(npar)]


def best_of(results: Sequence[RunResult]) -> RunResult:
    return min(results, key=lambda r: r.key)


def run_parallel(pop: Population, L: int, cvt: float, params: HeuristicParams | None = None,
                 npar: int = 1, workers: int | None = 1) -> RunResult:
    """Best of ``npar`` independent replicas seeded ``seed, seed+1, ...``.

    ``workers > 1`` runs replicas in worker processes; the winner does not depend
    on scheduling because ties are broken by (fobj, cv, xbest).
    """
    if npar < 1:
        raise ValueError("npar must be >= 1")
    params = params or HeuristicParams()
    plist = replica_params(params, npar)
    if npar == 1 or not workers or workers <= 1:
        ds = distinct_values(pop)
        results = [search(Problem(pop, L, cvt, ds), p) for p in plist]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, npar)) as ex:
            results = list(ex.map(_replica, [(pop, L, cvt, p) for p in plist]))
    return best_of(results)
