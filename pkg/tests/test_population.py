import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from stratmh.population import (EmptyInputError, InsufficientDistinctValues, NonFiniteValueError,
                                ParseError, Population, PopulationError, ZeroTotal,
                                distinct_values, load_population, validate_for_stratification)


finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


def test_load_sorts_plain_text():
    pop = load_population(b"3\n1\n2")
    assert pop.values.tolist() == [1, 2, 3]
    assert pop.total == 6
    assert pop.size == 3


def test_load_example_population():
    text = "\n".join(str(v) for v in [1, 2, 3, 3, 4, 5, 7, 8, 8, 9, 10, 12, 12, 15])
    pop = load_population(io.StringIO(text))
    assert pop.size == 14
    assert pop.total == 99


def test_parse_error_names_line():
    with pytest.raises(ParseError) as exc:
        load_population(b"abc")
    assert exc.value.line == 1
    with pytest.raises(ParseError, match="line 3"):
        load_population(b"1\n2\nx\n")


def test_crlf_blank_lines_and_file(tmp_path):
    path = tmp_path / "x.txt"
    path.write_bytes(b"1.5\r\n2.5\r\n\r\n4\r\n")
    pop = load_population(path)
    assert pop.values.tolist() == [1.5, 2.5, 4.0]
    assert load_population(str(path)).total == 8.0


def test_empty_and_nonfinite():
    with pytest.raises(EmptyInputError):
        load_population(b"\n\n")
    with pytest.raises(NonFiniteValueError):
        load_population(b"1\ninf\n")
    with pytest.raises(NonFiniteValueError):
        load_population(b"nan")


def test_csv_named_and_indexed_columns():
    text = "id,x\n1,10\n2,30\n3,20\n"
    assert load_population(text.encode(), column="x").values.tolist() == [10, 20, 30]
    assert load_population(text.encode(), column=1).values.tolist() == [10, 20, 30]
    # header is optional for index selection
    assert load_population(b"a,5\nb,7\n", column=1).values.tolist() == [5, 7]
    assert load_population(b"a,5\nb,7\n", column="1").values.tolist() == [5, 7]
    with pytest.raises(PopulationError, match="not found"):
        load_population(text.encode(), column="y")
    with pytest.raises(ParseError, match="line 3"):
        load_population(b"x\n1\noops\n", column="x")


def test_distinct_values_example(example_pop):
    ds = distinct_values(example_pop)
    assert ds.distinct.tolist() == [1, 2, 3, 4, 5, 7, 8, 9, 10, 12, 15]
    assert ds.size == 11
    assert ds.counts.tolist() == [1, 1, 2, 1, 1, 1, 2, 1, 1, 2, 1]


def test_distinct_degenerate_cases():
    ds = distinct_values(Population.from_values([4.0] * 7))
    assert ds.size == 1 and ds.counts.tolist() == [7]
    ds = distinct_values(Population.from_values([3, 1, 2, 5]))
    assert ds.size == 4 and ds.counts.tolist() == [1, 1, 1, 1]


def test_validate(example_pop, example_ds):
    validate_for_stratification(example_pop, example_ds, 3)
    with pytest.raises(InsufficientDistinctValues):
        validate_for_stratification(example_pop, example_ds, 6)
    zero = Population.from_values([-1, 1, -2, 2])
    with pytest.raises(ZeroTotal):
        validate_for_stratification(zero, distinct_values(zero), 2)


def test_negative_values_warn():
    pop = Population.from_values([-1, 2, 3, 4, 5])
    with pytest.warns(RuntimeWarning):
        validate_for_stratification(pop, distinct_values(pop), 2)


@given(st.lists(finite, min_size=1, max_size=60))
def test_population_invariants(xs):
    pop = Population.from_values(xs)
    assert np.all(np.diff(pop.values) >= 0)
    assert Population.from_values(pop.values).values.tolist() == pop.values.tolist()
    assert Population.from_values(list(reversed(xs))).total == pop.total
    assert math.isclose(pop.total, math.fsum(xs), rel_tol=1e-9, abs_tol=1e-9)


@given(st.lists(st.integers(-50, 50).map(float) | finite, min_size=1, max_size=80))
def test_distinct_set_invariants(xs):
    pop = Population.from_values(xs)
    ds = distinct_values(pop)
    assert np.all(np.diff(ds.distinct) > 0)
    assert int(ds.counts.sum()) == pop.size
    assert ds.expand().tolist() == pop.values.tolist()
    assert ds.prefix_count[-1] == pop.size
    assert math.isclose(ds.prefix_sum[-1], pop.total, rel_tol=1e-9, abs_tol=1e-6)
    assert np.all(np.diff(ds.prefix_count) > 0)
    assert np.all(np.diff(ds.prefix_sumsq) >= 0)


def test_prefix_sums_accurate_on_large_input():
    rng = np.random.default_rng(0)
    x = np.round(rng.lognormal(8, 1.5, 10**6), 2)
    pop = Population.from_values(x)
    ds = distinct_values(pop)
    n, s, ss = ds.run_moments(0, ds.size)
    assert n == pop.size
    assert math.isclose(s, math.fsum(x.tolist()), rel_tol=1e-12)
    assert math.isclose(ss, math.fsum((x * x).tolist()), rel_tol=1e-12)
