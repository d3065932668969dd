import itertools
import random

import numpy as np
import pytest

from stratmh.allocation import exact_min_allocation
from stratmh.heuristic import HeuristicParams, run_stratmh
from stratmh.oracle import (OracleLimitError, OracleLimits, brute_force_allocation,
                            brute_force_optimum, enumerate_solutions)
from stratmh.population import Population
from stratmh.strata import StrataSummary, count_solutions

from conftest import EXAMPLE_VALUES, synthetic_population


def test_enumerate_small():
    assert list(enumerate_solutions(7, 3)) == [(2, 2, 3), (2, 3, 2), (3, 2, 2)]
    assert list(enumerate_solutions(10, 5)) == [(2,) * 5]


@pytest.mark.parametrize("B,L", [(11, 3), (20, 4), (16, 5), (16, 2)])
def test_enumerate_total_unique_sorted(B, L):
    sols = list(enumerate_solutions(B, L))
    assert sols == sorted(set(sols))
    assert len(sols) == count_solutions(B, L)
    brute = {c for c in itertools.product(range(2, B + 1), repeat=L) if sum(c) == B}
    assert set(sols) == brute


def test_enumerate_guard():
    with pytest.raises(OracleLimitError):
        enumerate_solutions(200, 5, OracleLimits(max_ts=1000))
    with pytest.raises(ValueError):
        enumerate_solutions(5, 3)


# Regression constants for the worked 14-value population, frozen from an
# independent script (statistics.variance + exhaustive grid over all 21 stratifications).
@pytest.mark.parametrize("cvt,n,w", [
    (0.10, 6, (5, 4, 2)),
    (0.05, 8, (5, 4, 2)),
    (0.03, 10, (5, 3, 3)),
    (0.02, 12, (5, 3, 3)),
])
def test_brute_force_optimum_example(example_pop, cvt, n, w):
    r = brute_force_optimum(example_pop, 3, cvt)
    assert (r.fobj, r.xbest) == (n, w)
    assert r.cv <= cvt


def test_brute_force_census_tiebreak(example_pop):
    r = brute_force_optimum(example_pop, 3, 0.0)
    assert r.fobj == 14 and r.xbest == (2, 2, 7)


def test_brute_force_optimum_permutation_invariant():
    rnd = random.Random(5)
    vals = list(EXAMPLE_VALUES) + [17, 20, 21, 30]
    a = brute_force_optimum(Population.from_values(vals), 3, 0.04)
    rnd.shuffle(vals)
    b = brute_force_optimum(Population.from_values(vals), 3, 0.04)
    assert a.key == b.key


def test_brute_force_chunked_matches_serial():
    pop = synthetic_population(8, 45)
    assert (brute_force_optimum(pop, 3, 0.05, workers=3).key
            == brute_force_optimum(pop, 3, 0.05).key)


def test_brute_force_optimum_bounds_heuristic():
    pop = synthetic_population(12, 50)
    opt = brute_force_optimum(pop, 3, 0.05)
    for seed in range(3):
        assert run_stratmh(pop, 3, 0.05, HeuristicParams(seed=seed)).fobj >= opt.fobj


def test_brute_force_guard():
    pop = synthetic_population(0, 400)
    with pytest.raises(OracleLimitError):
        brute_force_optimum(pop, 5, 0.05, OracleLimits(max_ts=10**4))


def test_brute_force_allocation_extremes():
    ss = StrataSummary.from_stats([8, 11, 5], [3.0, 0.5, 7.0], 150.0)
    assert brute_force_allocation(ss, 10.0).nh == (2, 2, 2)
    assert brute_force_allocation(ss, 0.0).nh == (8, 11, 5)
    with pytest.raises(OracleLimitError):
        brute_force_allocation(StrataSummary.from_stats([13, 4], [1.0, 1.0], 10.0), 0.1)
    with pytest.raises(OracleLimitError):
        brute_force_allocation(StrataSummary.from_stats([3] * 5, [1.0] * 5, 10.0), 0.1)


def test_brute_force_allocation_tiebreak_prefers_lower_cv():
    ss = StrataSummary.from_stats([6, 6], [1.0, 4.0], 60.0)
    a = brute_force_allocation(ss, 0.05)
    same_n = [nh for nh in itertools.product(range(2, 7), repeat=2) if sum(nh) == a.n]
    assert a.nh == min(same_n, key=lambda nh: (1 * 36 / nh[0] * (1 - nh[0] / 6)
                                               + 4 * 36 / nh[1] * (1 - nh[1] / 6), nh))
    assert a.n == exact_min_allocation(ss, 0.05).n


def test_limits_validation():
    with pytest.raises(ValueError):
        OracleLimits(max_ts=0)
