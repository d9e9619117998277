"""Probability that one row precedes another under random column weights.

Max and Lex comparisons are decomposed into disjoint events, each pinning one
column's weight; the satisfying weight vectors of each event form a box (a
product of per-column weight sets), so the result is available both as a
probability and as a disjoint list of boxes. Sum uses a pseudo-polynomial
dynamic program over the running score difference.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .core import ProductDistribution, WeightVector
from .errors import ExactIntractable, InvalidInput, ResourceCapExceeded
from .ranking import Direction, RankingSpec, Score, normalize_spec

DEFAULT_DP_STATES = 10**7


class Tie(str, Enum):
    """Which of the two compared rows is placed first when their scores tie."""

    FIRST = "first"
    SECOND = "second"

    @classmethod
    def by_index(cls, a: int, b: int) -> Tie:
        return cls.FIRST if a < b else cls.SECOND


class Encoding(str, Enum):
    UNARY = "unary"
    BINARY = "binary"


WeightTerm = tuple[frozenset[Fraction], ...]


@dataclass(frozen=True)
class WeightSelection:
    """A disjoint union of boxes over weight vectors.

    Each term holds one set of admissible weights per column; a weight vector
    belongs to the term when every coordinate lies in its column's set.
    """

    terms: tuple[WeightTerm, ...]

    @classmethod
    def full(cls, dist: ProductDistribution) -> WeightSelection:
        return cls((tuple(frozenset(c.values) for c in dist.columns),))

    @classmethod
    def empty(cls) -> WeightSelection:
        return cls(())

    def __len__(self) -> int:
        return len(self.terms)

    def matches(self, u: Sequence[Fraction]) -> int:
        """Number of terms containing ``u`` (0 or 1 for a disjoint selection)."""
        return sum(1 for t in self.terms if all(v in s for v, s in zip(u, t)))

    def __contains__(self, u: Sequence[Fraction]) -> bool:
        return self.matches(u) > 0


def _box(sets: Iterable[Iterable[Fraction]]) -> WeightTerm | None:
    box = tuple(frozenset(s) for s in sets)
    return None if any(not s for s in box) else box


def intersect_selections(a: WeightSelection, b: WeightSelection) -> WeightSelection:
    terms = []
    for s in a.terms:
        for t in b.terms:
            box = _box(x & y for x, y in zip(s, t))
            if box is not None:
                terms.append(box)
    return WeightSelection(tuple(terms))


def intersect_all(selections: Iterable[WeightSelection], dist: ProductDistribution) -> WeightSelection:
    result = WeightSelection.full(dist)
    for sel in selections:
        result = intersect_selections(result, sel)
        if not result.terms:
            break
    return result


def selection_probability(s: WeightSelection, dist: ProductDistribution) -> Fraction:
    total = Fraction(0)
    for term in s.terms:
        p = Fraction(1)
        for col, allowed in zip(dist.columns, term):
            p *= col.mass(allowed)
            if not p:
                break
        total += p
    return total


# A competitor is one (low, high) entry pair per column. Its weighted value
# under weight v is the largest of v*low and v*high, which is what merging
# several rows column-wise must produce once weights may be negative. A plain
# row has low == high.
Competitor = tuple[tuple[Fraction, Fraction], ...]


def as_competitor(row: Sequence[Fraction]) -> Competitor:
    return tuple((v, v) for v in row)


def merge_rows(rows: Iterable[Sequence[Fraction]]) -> Competitor:
    cols = list(zip(*rows))
    if not cols:
        raise InvalidInput("cannot merge an empty set of rows")
    return tuple((min(c), max(c)) for c in cols)


def _val(comp: Competitor, j: int, v: Fraction) -> Fraction:
    lo, hi = comp[j]
    return v * hi if v >= 0 else v * lo


def max_exceeds(hi: Competitor, lo: Competitor, dist: ProductDistribution, strict: bool) -> WeightSelection:
    """Weight vectors with ``max(hi . u) > max(lo . u)`` (``>=`` when not strict).

    Split on the column where ``hi`` attains its first maximum and the weight
    of that column; all other columns are then constrained independently.
    """
    m = len(hi)
    terms = []
    for j, col in enumerate(dist.columns):
        for v in col.values:
            top = _val(hi, j, v)
            rival = _val(lo, j, v)
            if not (top > rival if strict else top >= rival):
                continue
            sets = []
            for k in range(m):
                if k == j:
                    sets.append((v,))
                    continue
                allowed = []
                for x in dist.columns[k].values:
                    beats_lo = top > _val(lo, k, x) if strict else top >= _val(lo, k, x)
                    # earlier columns must stay strictly below the winner, later ones may tie
                    beats_hi = top > _val(hi, k, x) if k < j else top >= _val(hi, k, x)
                    if beats_lo and beats_hi:
                        allowed.append(x)
                if not allowed:
                    break
                sets.append(allowed)
            else:
                terms.append(_box(sets))
    return WeightSelection(tuple(terms))


def prec_max(
    x: Sequence[Fraction],
    y: Sequence[Fraction],
    dist: ProductDistribution,
    direction: Direction | str,
    tie: Tie | str,
    want_weights: bool = False,
) -> tuple[Fraction, WeightSelection | None]:
    """P(x precedes y) under Max ranking; optionally the satisfying weights."""
    _check_pair(x, y, dist)
    direction, tie = Direction(direction), Tie(tie)
    cx, cy = as_competitor(x), as_competitor(y)
    if direction is Direction.ASC:
        # x first iff max(y) > max(x), or >= when x wins ties
        sel = max_exceeds(cy, cx, dist, strict=tie is Tie.SECOND)
    else:
        sel = max_exceeds(cx, cy, dist, strict=tie is Tie.SECOND)
    return selection_probability(sel, dist), (sel if want_weights else None)


def prec_lex(
    x: Sequence[Fraction],
    y: Sequence[Fraction],
    dist: ProductDistribution,
    tie: Tie | str,
    want_weights: bool = False,
) -> tuple[Fraction, WeightSelection | None]:
    """P(x precedes y) under ascending lexicographic ranking of the weighted rows."""
    _check_pair(x, y, dist)
    tie = Tie(tie)
    tied = [[v for v in col.values if v * x[k] == v * y[k]] for k, col in enumerate(dist.columns)]
    terms = []
    for j, col in enumerate(dist.columns):
        if any(not tied[k] for k in range(j)):
            break
        deciding = [v for v in col.values if v * x[j] < v * y[j]]
        if deciding:
            sets = tied[:j] + [deciding] + [col_k.values for col_k in dist.columns[j + 1:]]
            terms.append(_box(sets))
    if tie is Tie.FIRST and all(tied):
        terms.append(_box(tied))
    sel = WeightSelection(tuple(terms))
    return selection_probability(sel, dist), (sel if want_weights else None)


def _check_pair(x: Sequence[Fraction], y: Sequence[Fraction], dist: ProductDistribution) -> None:
    if len(x) != len(y) or len(x) != dist.m:
        raise InvalidInput(f"row lengths {len(x)}, {len(y)} do not match distribution width {dist.m}")


def _require_integral(x, y, dist: ProductDistribution) -> None:
    values = list(x) + list(y) + [v for c in dist.columns for v in c.values]
    bad = [v for v in values if Fraction(v).denominator != 1]
    if bad:
        raise InvalidInput(f"unary Sum computation needs integer entries and weights, got {bad[0]}")


def sum_dp_states(x: Sequence[Fraction], y: Sequence[Fraction], dist: ProductDistribution) -> int:
    """Number of table cells the Sum dynamic program allocates for this pair."""
    lo = hi = 0
    states = 1
    for j, col in enumerate(dist.columns):
        steps = [int(v * (y[j] - x[j])) for v in col.values]
        lo += min(steps)
        hi += max(steps)
        states += hi - lo + 1
    return states


def prec_sum_dp(
    x: Sequence[Fraction],
    y: Sequence[Fraction],
    dist: ProductDistribution,
    tie: Tie | str,
    max_states: int = DEFAULT_DP_STATES,
) -> Fraction:
    """P(x precedes y) under ascending Sum ranking, for integer data.

    The table is indexed by column and by the running difference
    ``sum_k u_k (y[k] - x[k])`` over the columns processed so far; x comes
    first when the final difference is positive (or zero, if x wins ties).
    """
    _check_pair(x, y, dist)
    _require_integral(x, y, dist)
    tie = Tie(tie)
    states = sum_dp_states(x, y, dist)
    if states > max_states:
        raise ResourceCapExceeded("dp-states", states, max_states)

    # probabilities as integer numerators over a per-column common denominator
    table = [1]
    offset = 0  # table[i] holds the difference offset + i
    denominator = 1
    for j, col in enumerate(dist.columns):
        scale = math.lcm(*(p.denominator for _, p in col.support))
        moves = [(int(v * (y[j] - x[j])), int(p * scale)) for v, p in col.support]
        low = min(step for step, _ in moves)
        high = max(step for step, _ in moves)
        nxt = [0] * (len(table) + high - low)
        for i, cell in enumerate(table):
            if cell:
                for step, weight in moves:
                    nxt[i + step - low] += cell * weight
        table = nxt
        offset += low
        denominator *= scale

    first_ok = -offset if tie is Tie.FIRST else -offset + 1
    favourable = sum(table[max(first_ok, 0):])
    return Fraction(favourable, denominator)


def prec_probability(
    x: Sequence[Fraction],
    y: Sequence[Fraction],
    dist: ProductDistribution,
    spec: RankingSpec,
    tie: Tie | str,
    encoding: Encoding | str = Encoding.UNARY,
    max_states: int = DEFAULT_DP_STATES,
) -> Fraction:
    """Exact probability that row ``x`` is ranked before row ``y``."""
    _check_pair(x, y, dist)
    canonical, negate = normalize_spec(spec)
    if negate:
        x = tuple(-v for v in x)
        y = tuple(-v for v in y)
    if canonical.score is Score.SUM:
        if Encoding(encoding) is Encoding.BINARY:
            raise ExactIntractable(
                "PREC(Sum, binary)",
                "precedence under Sum ranking counts knapsack solutions when numbers are in binary",
            )
        return prec_sum_dp(x, y, dist, tie, max_states)
    if canonical.score is Score.MAX:
        return prec_max(x, y, dist, canonical.direction, tie)[0]
    return prec_lex(x, y, dist, tie)[0]


def prec_selection(
    x: Sequence[Fraction],
    y: Sequence[Fraction],
    dist: ProductDistribution,
    spec: RankingSpec,
    tie: Tie | str,
) -> WeightSelection:
    """Weight vectors under which x precedes y, for Max/Min/Lex rankings."""
    canonical, negate = normalize_spec(spec)
    if negate:
        x = tuple(-v for v in x)
        y = tuple(-v for v in y)
    if canonical.score is Score.MAX:
        return prec_max(x, y, dist, canonical.direction, tie, want_weights=True)[1]
    if canonical.score is Score.LEX:
        return prec_lex(x, y, dist, tie, want_weights=True)[1]
    raise InvalidInput("Sum precedence has no box representation of its weight set")


def precedes(x: Sequence[Fraction], y: Sequence[Fraction], u: WeightVector, spec: RankingSpec, tie: Tie | str) -> bool:
    """Whether x precedes y for one concrete weight vector."""
    canonical, negate = normalize_spec(spec)
    sign = -1 if negate else 1
    wx = [sign * a * w for a, w in zip(x, u)]
    wy = [sign * a * w for a, w in zip(y, u)]
    if canonical.score is Score.SUM:
        sx, sy = sum(wx), sum(wy)
    elif canonical.score is Score.MAX:
        sx, sy = max(wx), max(wy)
        if canonical.direction is Direction.DSC:
            sx, sy = -sx, -sy
    else:
        sx, sy = tuple(wx), tuple(wy)
    if sx == sy:
        return Tie(tie) is Tie.FIRST
    return sx < sy
