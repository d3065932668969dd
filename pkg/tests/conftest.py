import numpy as np
import pytest

from stratmh.population import Population, distinct_values

EXAMPLE_VALUES = [1, 2, 3, 3, 4, 5, 7, 8, 8, 9, 10, 12, 12, 15]


@pytest.fixture
def example_pop():
    return Population.from_values(EXAMPLE_VALUES)


@pytest.fixture
def example_ds(example_pop):
    return distinct_values(example_pop)


def synthetic_population(seed: int, n: int, kind: int | None = None, decimals: int = 1):
    """Skewed test populations in the spirit of the usual benchmark sets."""
    rng = np.random.default_rng(seed)
    kind = seed % 3 if kind is None else kind
    if kind == 0:
        x = np.exp(rng.normal(4.0, 1.2, n))
    elif kind == 1:
        x = rng.gamma(2.0, 50.0, n)
    else:
        x = rng.weibull(0.7, n) * 100.0
    return Population.from_values(np.round(x, decimals))


# criterion number -> (passed, description, detail); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {k}. {title}: {detail}")
