"""Population loading and the distinct-value view used by the stratifier.

The stratification variable is handled as a sorted vector of floats. Every
stratification is expressed over the set of *distinct* values, so the
:class:`DistinctSet` keeps cumulative count / sum / sum-of-squares arrays that
give the size and variance of any run of consecutive distinct values in O(1).
"""

from __future__ import annotations

import csv
import io
import math
import os
import warnings
from dataclasses import dataclass, field
from typing import IO, Iterable, Union

import numpy as np

Source = Union[str, os.PathLike, IO[str], IO[bytes], bytes]


class PopulationError(ValueError):
    """Base class for problems with the population input."""


class ParseError(PopulationError):
    def __init__(self, line: int, text: str, reason: str = "not a number"):
        self.line = line
        self.text = text
        super().__init__(f"line {line}: cannot parse {text!r} ({reason})")


class EmptyInputError(PopulationError):
    pass


class NonFiniteValueError(PopulationError):
    pass


class InsufficientDistinctValues(PopulationError):
    pass


class ZeroTotal(PopulationError):
    pass


@dataclass(frozen=True)
class Population:
    """Sorted population vector with its total and size."""

    values: np.ndarray
    total: float
    size: int

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "Population":
        if not isinstance(values, np.ndarray):
            values = list(values)
        arr = np.sort(np.asarray(values, dtype=float))
        if arr.ndim != 1:
            raise PopulationError("population must be one-dimensional")
        if arr.size == 0:
            raise EmptyInputError("population is empty")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteValueError("population contains non-finite values")
        arr.setflags(write=False)
        return cls(values=arr, total=math.fsum(arr.tolist()), size=int(arr.size))


@dataclass(frozen=True)
class DistinctSet:
    """Unique values of a population with multiplicities and inclusive prefix sums.

    ``prefix_*[j]`` accumulates over distinct indices ``0..j``.
    """

    distinct: np.ndarray
    counts: np.ndarray
    prefix_count: np.ndarray
    prefix_sum: np.ndarray
    prefix_sumsq: np.ndarray
    # Neumaier compensation terms for the two float prefixes.
    _sum_comp: np.ndarray = field(repr=False, default=None)
    _sumsq_comp: np.ndarray = field(repr=False, default=None)

    def __len__(self) -> int:
        return int(self.distinct.size)

    @property
    def size(self) -> int:
        return int(self.distinct.size)

    def run_moments(self, start: int, stop: int) -> tuple[int, float, float]:
        """Count, sum and sum of squares over distinct indices ``[start, stop)``."""
        last = stop - 1
        if start == 0:
            return (int(self.prefix_count[last]),
                    float(self.prefix_sum[last]) + float(self._sum_comp[last]),
                    float(self.prefix_sumsq[last]) + float(self._sumsq_comp[last]))
        prev = start - 1
        n = int(self.prefix_count[last] - self.prefix_count[prev])
        s = ((float(self.prefix_sum[last]) - float(self.prefix_sum[prev]))
             + (float(self._sum_comp[last]) - float(self._sum_comp[prev])))
        ss = ((float(self.prefix_sumsq[last]) - float(self.prefix_sumsq[prev]))
              + (float(self._sumsq_comp[last]) - float(self._sumsq_comp[prev])))
        return n, s, ss

    def expand(self) -> np.ndarray:
        """Rebuild the sorted population from ``(distinct, counts)``."""
        return np.repeat(self.distinct, self.counts)


def _compensated_prefix(terms: list[float]) -> tuple[np.ndarray, np.ndarray]:
    hi = np.empty(len(terms))
    lo = np.empty(len(terms))
    s = 0.0
    c = 0.0
    for j, x in enumerate(terms):
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
        hi[j] = s
        lo[j] = c
    return hi, lo


def distinct_values(pop: Population) -> DistinctSet:
    distinct, counts = np.unique(pop.values, return_counts=True)
    d = distinct.tolist()
    k = counts.tolist()
    psum, csum = _compensated_prefix([x * m for x, m in zip(d, k)])
    psq, csq = _compensated_prefix([x * x * m for x, m in zip(d, k)])
    pcount = np.cumsum(counts)
    for a in (distinct, counts, pcount, psum, csum, psq, csq):
        a.setflags(write=False)
    return DistinctSet(distinct=distinct, counts=counts, prefix_count=pcount,
                       prefix_sum=psum, prefix_sumsq=psq, _sum_comp=csum, _sumsq_comp=csq)


def validate_for_stratification(pop: Population, ds: DistinctSet, L: int) -> None:
    """Raise unless ``L`` strata of at least two distinct values each fit."""
    if L < 2:
        raise ValueError(f"L must be >= 2, got {L}")
    if ds.size < 2 * L:
        raise InsufficientDistinctValues(
            f"{ds.size} distinct values cannot form {L} strata (need {2 * L})")
    if pop.total == 0:
        raise ZeroTotal("population total is zero; coefficient of variation is undefined")
    if pop.values[0] < 0:
        warnings.warn("population contains negative values", RuntimeWarning, stacklevel=2)


def _parse_number(text: str, line: int) -> float:
    try:
        x = float(text)
    except ValueError:
        raise ParseError(line, text) from None
    if not math.isfinite(x):
        raise NonFiniteValueError(f"line {line}: non-finite value {text!r}")
    return x


def _read_text(source: Source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8-sig")
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return fh.read().decode("utf-8-sig")
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8-sig")
    return data


def _plain_values(text: str) -> list[float]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s:
            continue
        out.append(_parse_number(s, lineno))
    return out


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def _csv_values(text: str, column: str | int) -> list[float]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        return []
    first = rows[0]
    if isinstance(column, str) and not column.lstrip("-").isdigit():
        names = [c.strip() for c in first]
        if column not in names:
            raise PopulationError(f"column {column!r} not found in header {names}")
        idx = names.index(column)
        start = 1
    else:
        idx = int(column)
        # header is optional when selecting by index
        start = 0 if (idx < len(first) and _is_number(first[idx].strip())) else 1
    out = []
    for lineno, row in enumerate(rows[start:], start=start + 1):
        if not row or all(not c.strip() for c in row):
            continue
        if idx >= len(row) or idx < -len(row):
            raise ParseError(lineno, ",".join(row), f"no column {idx}")
        out.append(_parse_number(row[idx].strip(), lineno))
    return out


def load_population(source: Source, column: str | int | None = None) -> Population:
    """Read a population from plain text (one value per line) or a CSV column.

    ``source`` may be a path, raw bytes, or an open text/binary stream. With
    ``column`` unset the input is read as plain text; otherwise it is parsed as
    CSV and the named (header) or zero-based indexed column is used.
    """
    text = _read_text(source)
    values = _plain_values(text) if column is None else _csv_values(text, column)
    if not values:
        raise EmptyInputError("no values in input")
    return Population.from_values(values)
