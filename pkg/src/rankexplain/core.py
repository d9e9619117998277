"""Exact numeric and combinatorial building blocks.

Every number is a :class:`fractions.Fraction`. Rows and columns are
1-indexed wherever they cross the public API; tuples inside the objects are
plain 0-indexed Python sequences.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational as _RationalABC

from .errors import InvalidInput

Rational = Fraction
WeightVector = tuple[Fraction, ...]


def to_rational(x: object) -> Fraction:
    """Parse ``x`` into a Fraction; accepts ints, Fractions and strings like ``"-3/4"``.

    Floats are refused so that no binary rounding error enters an exact path.
    """
    if isinstance(x, bool):
        raise InvalidInput(f"not a rational number: {x!r}")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"not a rational number: {x!r}") from exc
    raise InvalidInput(f"not a rational number: {x!r} ({type(x).__name__})")


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def weight_vector(values: Iterable[object]) -> WeightVector:
    return tuple(to_rational(v) for v in values)


@dataclass(frozen=True)
class Matrix:
    """An ``n x m`` matrix of rationals whose rows are the ranked tuples.

    ``m`` may be 0 (the restriction to the empty column set); ``n`` may not.
    """

    rows: tuple[tuple[Fraction, ...], ...]
    m: int

    def __post_init__(self) -> None:
        if len(self.rows) < 1:
            raise InvalidInput("a matrix needs at least one row")
        for row in self.rows:
            if len(row) != self.m:
                raise InvalidInput(f"ragged matrix: expected {self.m} entries, got {len(row)}")

    @classmethod
    def of(cls, rows: Iterable[Iterable[object]], m: int | None = None) -> Matrix:
        parsed = tuple(tuple(to_rational(v) for v in row) for row in rows)
        if m is None:
            if not parsed:
                raise InvalidInput("a matrix needs at least one row")
            m = len(parsed[0])
        return cls(parsed, m)

    @property
    def n(self) -> int:
        return len(self.rows)

    def row(self, i: int) -> tuple[Fraction, ...]:
        """Row ``i`` (1-indexed)."""
        check_row(i, self.n)
        return self.rows[i - 1]

    def column(self, j: int) -> tuple[Fraction, ...]:
        """Column ``j`` (1-indexed)."""
        check_column(j, self.m)
        return tuple(r[j - 1] for r in self.rows)

    def entries(self) -> Iterator[Fraction]:
        for r in self.rows:
            yield from r

    def negated(self) -> Matrix:
        return Matrix(tuple(tuple(-v for v in r) for r in self.rows), self.m)

    def shifted(self, c: Fraction) -> Matrix:
        return Matrix(tuple(tuple(v + c for v in r) for r in self.rows), self.m)

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for v in self.entries())

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self.rows]


def check_row(i: int, n: int) -> None:
    if not isinstance(i, int) or isinstance(i, bool) or not 1 <= i <= n:
        raise InvalidInput(f"row index {i!r} outside 1..{n}")


def check_column(j: int, m: int) -> None:
    if not isinstance(j, int) or isinstance(j, bool) or not 1 <= j <= m:
        raise InvalidInput(f"column index {j!r} outside 1..{m}")


def column_set(columns: Iterable[int], m: int) -> tuple[int, ...]:
    """Canonical (sorted, duplicate-free) 1-indexed column set."""
    cols = tuple(columns)
    for j in cols:
        check_column(j, m)
    if len(set(cols)) != len(cols):
        raise InvalidInput(f"duplicate columns in {cols}")
    return tuple(sorted(cols))


def incidence_vector(columns: Iterable[int], m: int) -> WeightVector:
    chosen = set(column_set(columns, m))
    return tuple(Fraction(1) if j in chosen else Fraction(0) for j in range(1, m + 1))


def apply_weights(M: Matrix, u: Sequence[object]) -> Matrix:
    """Multiply column ``j`` of ``M`` by ``u[j]``."""
    if len(u) != M.m:
        raise InvalidInput(f"weight vector has length {len(u)}, matrix has {M.m} columns")
    w = weight_vector(u)
    return Matrix(tuple(tuple(v * wj for v, wj in zip(r, w)) for r in M.rows), M.m)


def restrict_columns(M: Matrix, columns: Iterable[int]) -> Matrix:
    """Keep only the given (1-indexed) columns, in their original order."""
    cols = column_set(columns, M.m)
    return Matrix(tuple(tuple(r[j - 1] for j in cols) for r in M.rows), len(cols))


@dataclass(frozen=True)
class Permutation:
    """A ranking of ``n`` rows.

    ``order`` is the ranked row sequence (row ids by rank, the format used in
    tables); ``ranks[i - 1]`` is the rank of row ``i``. Both are 1-indexed.
    """

    order: tuple[int, ...]
    ranks: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n = len(self.order)
        if sorted(self.order) != list(range(1, n + 1)):
            raise InvalidInput(f"not a permutation of 1..{n}: {self.order}")
        ranks = [0] * n
        for pos, row in enumerate(self.order, start=1):
            ranks[row - 1] = pos
        object.__setattr__(self, "ranks", tuple(ranks))

    @classmethod
    def from_order(cls, order: Iterable[int]) -> Permutation:
        return cls(tuple(order))

    @classmethod
    def from_ranks(cls, ranks: Sequence[int]) -> Permutation:
        n = len(ranks)
        if sorted(ranks) != list(range(1, n + 1)):
            raise InvalidInput(f"not a rank vector over 1..{n}: {tuple(ranks)}")
        order = [0] * n
        for row, r in enumerate(ranks, start=1):
            order[r - 1] = row
        return cls(tuple(order))

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.order)

    def rank(self, row: int) -> int:
        return self.ranks[row - 1]

    def row_at(self, rank: int) -> int:
        return self.order[rank - 1]

    def top(self, k: int) -> frozenset[int]:
        return frozenset(self.order[:k])


@dataclass(frozen=True)
class ColumnDistribution:
    """A finite distribution over one column weight: ``((value, probability), ...)``."""

    support: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self) -> None:
        if not self.support:
            raise InvalidInput("empty weight distribution")
        values = [v for v, _ in self.support]
        if len(set(values)) != len(values):
            raise InvalidInput(f"duplicate support values in {values}")
        for v, p in self.support:
            if p <= 0:
                raise InvalidInput(f"support value {v} has non-positive probability {p}")
        total = sum((p for _, p in self.support), Fraction(0))
        if total != 1:
            raise InvalidInput(f"probabilities sum to {total}, not 1")

    @classmethod
    def of(cls, pairs: Iterable[tuple[object, object]]) -> ColumnDistribution:
        return cls(tuple((to_rational(v), to_rational(p)) for v, p in pairs))

    @classmethod
    def uniform(cls, values: Iterable[object]) -> ColumnDistribution:
        vals = [to_rational(v) for v in values]
        return cls(tuple((v, Fraction(1, len(vals))) for v in vals))

    @classmethod
    def point(cls, value: object) -> ColumnDistribution:
        return cls(((to_rational(value), Fraction(1)),))

    @property
    def values(self) -> tuple[Fraction, ...]:
        return tuple(v for v, _ in self.support)

    def prob(self, value: Fraction) -> Fraction:
        for v, p in self.support:
            if v == value:
                return p
        return Fraction(0)

    def mass(self, values: Iterable[Fraction]) -> Fraction:
        chosen = set(values)
        return sum((p for v, p in self.support if v in chosen), Fraction(0))

    def mixed_with_point(self, value: Fraction, theta: Fraction) -> ColumnDistribution:
        """``theta * delta_value + (1 - theta) * self``, merging coinciding masses."""
        if not 0 <= theta <= 1:
            raise InvalidInput(f"mixing weight {theta} outside [0, 1]")
        masses: dict[Fraction, Fraction] = {}
        for v, p in self.support:
            masses[v] = masses.get(v, Fraction(0)) + (1 - theta) * p
        masses[value] = masses.get(value, Fraction(0)) + theta
        return ColumnDistribution(tuple((v, p) for v, p in masses.items() if p > 0))


@dataclass(frozen=True)
class ProductDistribution:
    """Independent per-column weight distributions."""

    columns: tuple[ColumnDistribution, ...]

    @classmethod
    def of(cls, columns: Iterable[ColumnDistribution | Iterable[tuple[object, object]]]) -> ProductDistribution:
        cols = tuple(c if isinstance(c, ColumnDistribution) else ColumnDistribution.of(c) for c in columns)
        return cls(cols)

    @classmethod
    def uniform(cls, values: Iterable[object], m: int) -> ProductDistribution:
        vals = list(values)
        return cls(tuple(ColumnDistribution.uniform(vals) for _ in range(m)))

    @classmethod
    def point(cls, w: Sequence[object]) -> ProductDistribution:
        return cls(tuple(ColumnDistribution.point(v) for v in w))

    @property
    def m(self) -> int:
        return len(self.columns)

    @property
    def size(self) -> int:
        """Total number of value/probability pairs."""
        return sum(len(c.support) for c in self.columns)

    @property
    def space_size(self) -> int:
        return math.prod(len(c.support) for c in self.columns)

    def check_width(self, m: int) -> None:
        if self.m != m:
            raise InvalidInput(f"distribution has {self.m} columns, matrix has {m}")

    def contains(self, w: Sequence[Fraction]) -> bool:
        return len(w) == self.m and all(c.prob(v) > 0 for c, v in zip(self.columns, w))

    def outcomes(self) -> Iterator[tuple[WeightVector, Fraction]]:
        """All weight vectors with their probabilities."""
        for combo in itertools.product(*(c.support for c in self.columns)):
            p = Fraction(1)
            for _, q in combo:
                p *= q
            yield tuple(v for v, _ in combo), p

    def replace(self, j: int, dist: ColumnDistribution) -> ProductDistribution:
        """Copy with column ``j`` (1-indexed) replaced."""
        check_column(j, self.m)
        cols = list(self.columns)
        cols[j - 1] = dist
        return ProductDistribution(tuple(cols))
