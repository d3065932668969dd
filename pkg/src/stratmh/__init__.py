"""Optimal univariate stratification for a target coefficient of variation."""

from .allocation import (Allocation, allocate, allocate_for_solution, exact_min_allocation,
                         neyman_allocate, neyman_min_n, round_and_clamp)
from .harness import (ScenarioConfig, ScenarioReport, efficiency_ratio, emit_report,
                      random_search_baseline, run_scenarios)
from .heuristic import (HeuristicParams, RunResult, construct_solution, crossover,
                        mutate, partition_elite, run_parallel, run_stratmh)
from .oracle import (OracleLimits, brute_force_allocation, brute_force_optimum,
                     enumerate_solutions)
from .population import (DistinctSet, Population, distinct_values, load_population,
                         validate_for_stratification)
from .strata import (Solution, StrataSummary, count_solutions, estimator_cv,
                     estimator_variance, stratum_variance, summarize)

__version__ = "0.1.0"
