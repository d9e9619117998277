"""Ranking functions with index tie-breaking, and the seven effect functions."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .core import Matrix, Permutation, check_row
from .errors import InvalidInput


class Score(str, Enum):
    SUM = "sum"
    MAX = "max"
    MIN = "min"
    LEX = "lex"


class Direction(str, Enum):
    ASC = "asc"
    DSC = "dsc"


@dataclass(frozen=True)
class RankingSpec:
    score: Score
    direction: Direction = Direction.ASC

    def __post_init__(self) -> None:
        object.__setattr__(self, "score", Score(self.score))
        object.__setattr__(self, "direction", Direction(self.direction))
        if self.score is Score.LEX and self.direction is Direction.DSC:
            raise InvalidInput("lexicographic ranking is ascending only")

    @classmethod
    def parse(cls, text: str) -> RankingSpec:
        """``"max-dsc"``, ``"sum"``, ``"lex"`` ..."""
        score, _, direction = text.strip().lower().partition("-")
        return cls(Score(score), Direction(direction or "asc"))

    def __str__(self) -> str:
        return f"{self.score.value}-{self.direction.value}"

    @property
    def is_canonical(self) -> bool:
        return self in CANONICAL_SPECS


SUM = RankingSpec(Score.SUM)
SUM_DSC = RankingSpec(Score.SUM, Direction.DSC)
MAX_ASC = RankingSpec(Score.MAX, Direction.ASC)
MAX_DSC = RankingSpec(Score.MAX, Direction.DSC)
MIN_ASC = RankingSpec(Score.MIN, Direction.ASC)
MIN_DSC = RankingSpec(Score.MIN, Direction.DSC)
LEX = RankingSpec(Score.LEX)
CANONICAL_SPECS = (SUM, MAX_ASC, MAX_DSC, LEX)
ALL_SPECS = (SUM, SUM_DSC, MAX_ASC, MAX_DSC, MIN_ASC, MIN_DSC, LEX)


def normalize_spec(spec: RankingSpec) -> tuple[RankingSpec, bool]:
    """Canonical spec and whether the matrix entries must be negated to use it.

    Sum descending becomes Sum ascending of the negated matrix; Min becomes
    Max of the negated matrix in the opposite direction.
    """
    if spec == SUM_DSC:
        return SUM, True
    if spec.score is Score.MIN:
        flipped = Direction.DSC if spec.direction is Direction.ASC else Direction.ASC
        return RankingSpec(Score.MAX, flipped), True
    return spec, False


def normalize(M: Matrix, spec: RankingSpec) -> tuple[Matrix, RankingSpec]:
    canonical, negate = normalize_spec(spec)
    return (M.negated() if negate else M), canonical


def _sort_key(spec: RankingSpec):
    # spec is canonical here
    if spec.score is Score.SUM:
        return lambda row: sum(row, Fraction(0))
    if spec.score is Score.LEX:
        return tuple
    if spec.direction is Direction.ASC:
        return max
    return lambda row: -max(row)


def rank_rows(rows: tuple[tuple[Fraction, ...], ...], spec: RankingSpec) -> tuple[int, ...]:
    """Ranked sequence of 1-indexed row ids; rows must be non-empty tuples."""
    canonical, negate = normalize_spec(spec)
    if negate:
        rows = tuple(tuple(-v for v in r) for r in rows)
    key = _sort_key(canonical)
    # sorted() is stable, so equal scores keep index order
    return tuple(i + 1 for i in sorted(range(len(rows)), key=lambda i: key(rows[i])))


def rank_matrix(M: Matrix, spec: RankingSpec) -> Permutation:
    """Rank the rows of ``M``; ties go to the smaller row index.

    A matrix without columns ranks as the identity.
    """
    if M.m == 0:
        return Permutation.identity(M.n)
    return Permutation(rank_rows(M.rows, spec))


class EffectKind(str, Enum):
    KENDALL_TAU = "kendall_tau"
    MAX_DISPLACEMENT = "max_displacement"
    HAMMING = "hamming"
    POSITION = "position"
    TOPK_MEMBERSHIP = "topk_membership"
    TOPK_DIFFERENCE = "topk_difference"
    TOPK_ANYCHANGE = "topk_anychange"


TOPK_KINDS = frozenset({EffectKind.TOPK_MEMBERSHIP, EffectKind.TOPK_DIFFERENCE, EffectKind.TOPK_ANYCHANGE})
ROW_KINDS = frozenset({EffectKind.POSITION, EffectKind.TOPK_MEMBERSHIP})


@dataclass(frozen=True)
class EffectSpec:
    kind: EffectKind
    row: int | None = None
    k: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", EffectKind(self.kind))
        if self.kind in ROW_KINDS and self.row is None:
            raise InvalidInput(f"effect {self.kind.value} needs a row")
        if self.kind in TOPK_KINDS and self.k is None:
            raise InvalidInput(f"effect {self.kind.value} needs k")
        if self.row is not None and (not isinstance(self.row, int) or self.row < 1):
            raise InvalidInput(f"bad row {self.row!r}")
        if self.k is not None and (not isinstance(self.k, int) or self.k < 1):
            raise InvalidInput(f"bad k {self.k!r}")

    def validate(self, n: int) -> None:
        if self.row is not None:
            check_row(self.row, n)
        if self.k is not None and self.k > n:
            raise InvalidInput(f"k={self.k} exceeds the number of rows {n}")

    def __str__(self) -> str:
        extra = [f"row={self.row}"] * (self.row is not None) + [f"k={self.k}"] * (self.k is not None)
        return self.kind.value + (f"({', '.join(extra)})" if extra else "")


@dataclass(frozen=True)
class EffectContext:
    """An effect function bound to its base permutation."""

    base: Permutation
    spec: EffectSpec

    def __post_init__(self) -> None:
        self.spec.validate(self.base.n)

    def __call__(self, pi: Permutation) -> Fraction:
        return effect_value(self, pi)


def effect_value(ctx: EffectContext, pi: Permutation) -> Fraction:
    base, spec = ctx.base, ctx.spec
    n = base.n
    if pi.n != n:
        raise InvalidInput(f"permutation over {pi.n} rows compared with base over {n}")
    r0, r = base.ranks, pi.ranks
    kind = spec.kind
    if kind is EffectKind.KENDALL_TAU:
        value = sum(
            1
            for a in range(n)
            for b in range(a + 1, n)
            if (r0[a] < r0[b]) != (r[a] < r[b])
        )
    elif kind is EffectKind.MAX_DISPLACEMENT:
        value = max(abs(x - y) for x, y in zip(r, r0))
    elif kind is EffectKind.HAMMING:
        value = sum(1 for x, y in zip(r, r0) if x != y)
    elif kind is EffectKind.POSITION:
        value = r[spec.row - 1] - r0[spec.row - 1]
    elif kind is EffectKind.TOPK_MEMBERSHIP:
        value = int(r[spec.row - 1] <= spec.k) - int(r0[spec.row - 1] <= spec.k)
    else:
        common = len(pi.top(spec.k) & base.top(spec.k))
        if kind is EffectKind.TOPK_DIFFERENCE:
            value = 2 * spec.k - 2 * common
        else:
            value = int(common != spec.k)
    return Fraction(value)


def effect_range(spec: EffectSpec, n: int) -> tuple[Fraction, Fraction]:
    """Smallest interval that contains every value of the effect over ``n`` rows."""
    kind = spec.kind
    if kind is EffectKind.KENDALL_TAU:
        lo, hi = 0, n * (n - 1) // 2
    elif kind is EffectKind.MAX_DISPLACEMENT:
        lo, hi = 0, n - 1
    elif kind is EffectKind.HAMMING:
        lo, hi = 0, n
    elif kind is EffectKind.POSITION:
        lo, hi = -(n - 1), n - 1
    elif kind is EffectKind.TOPK_MEMBERSHIP:
        lo, hi = -1, 1
    elif kind is EffectKind.TOPK_DIFFERENCE:
        lo, hi = 0, 2 * spec.k
    else:
        lo, hi = 0, 1
    return Fraction(lo), Fraction(hi)
