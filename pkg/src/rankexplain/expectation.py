"""Exact expected effect of random column weights on a ranking.

``expect_effect`` dispatches each (ranking, effect) combination to the method
that is polynomial for it, or refuses with :class:`ExactIntractable` when the
combination is #P-hard. In ``auto`` mode a hard combination may still be
answered when one of the matrix dimensions is small enough to enumerate.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterator
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .core import Matrix, Permutation, ProductDistribution, apply_weights
from .errors import ExactIntractable, InvalidInput, ResourceCapExceeded
from .pairwise import (
    DEFAULT_DP_STATES,
    Encoding,
    Tie,
    WeightSelection,
    as_competitor,
    intersect_selections,
    max_exceeds,
    merge_rows,
    prec_probability,
    prec_selection,
    selection_probability,
)
from .ranking import (
    MAX_DSC,
    TOPK_KINDS,
    EffectContext,
    EffectKind,
    EffectSpec,
    RankingSpec,
    Score,
    normalize,
    rank_matrix,
)


@dataclass(frozen=True)
class Caps:
    """Resource guards for the exact methods.

    ``topk_k`` is the largest k treated as a fixed parameter; larger k is
    considered part of the input unless ``allow_large_k`` is set.
    """

    weight_space: int = 2**20
    permutation_rows: int = 8
    topk_k: int = 3
    dp_states: int = DEFAULT_DP_STATES
    allow_large_k: bool = False


DEFAULT_CAPS = Caps()


class Method(str, Enum):
    PAIRWISE = "pairwise-linearity"
    INCLUSION_EXCLUSION = "inclusion-exclusion"
    ENUMERATE_WEIGHTS = "enumerate-weights"
    ENUMERATE_PERMUTATIONS = "enumerate-permutations"
    PERMUTATION_DP = "permutation-dp"


@dataclass(frozen=True)
class ExpInstance:
    """Matrix, weight distribution, ranking, effect and base permutation.

    ``base`` defaults to the ranking of the unweighted matrix.
    """

    M: Matrix
    dist: ProductDistribution
    spec: RankingSpec
    effect: EffectSpec
    base: Permutation | None = None
    encoding: Encoding = Encoding.UNARY
    _norm: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.dist.check_width(self.M.m)
        self.effect.validate(self.M.n)
        object.__setattr__(self, "encoding", Encoding(self.encoding))
        if self.base is None:
            object.__setattr__(self, "base", rank_matrix(self.M, self.spec))
        elif self.base.n != self.M.n:
            raise InvalidInput(f"base permutation over {self.base.n} rows, matrix has {self.M.n}")
        object.__setattr__(self, "_norm", normalize(self.M, self.spec))

    @property
    def n(self) -> int:
        return self.M.n

    @property
    def canonical(self) -> RankingSpec:
        return self._norm[1]

    @property
    def rows(self) -> tuple[tuple[Fraction, ...], ...]:
        """Rows of the matrix after normalization to the canonical spec."""
        return self._norm[0].rows

    def context(self) -> EffectContext:
        return EffectContext(self.base, self.effect)


class _Pairs:
    """Memoized P(row a before row b), ties resolved by row index (0-indexed rows)."""

    def __init__(self, inst: ExpInstance, caps: Caps):
        self.inst = inst
        self.caps = caps
        self._memo: dict[tuple[int, int], Fraction] = {}

    def __call__(self, a: int, b: int) -> Fraction:
        if (a, b) not in self._memo:
            if (b, a) in self._memo:
                self._memo[a, b] = 1 - self._memo[b, a]
            else:
                rows = self.inst.rows
                self._memo[a, b] = prec_probability(
                    rows[a], rows[b], self.inst.dist, self.inst.canonical,
                    Tie.by_index(a, b), self.inst.encoding, self.caps.dp_states,
                )
        return self._memo[a, b]


def _sum_binary_error(inst: ExpInstance) -> ExactIntractable:
    return ExactIntractable(
        f"EXP(sum, {inst.effect.kind.value}) with binary encoding",
        "counting knapsack reduces to precedence under Sum ranking",
    )


def expect_kendall_tau(inst: ExpInstance, caps: Caps = DEFAULT_CAPS) -> Fraction:
    """Sum over pairs ordered by the base of the probability that they swap."""
    pair = _Pairs(inst, caps)
    order = inst.base.order
    total = Fraction(0)
    for pos, a in enumerate(order):
        for b in order[pos + 1:]:
            total += pair(b - 1, a - 1)
    return total


def expect_position(inst: ExpInstance, i: int | None = None, caps: Caps = DEFAULT_CAPS) -> Fraction:
    """Expected rank of row ``i`` minus its base rank."""
    i = inst.effect.row if i is None else i
    pair = _Pairs(inst, caps)
    expected_rank = 1 + sum((pair(j, i - 1) for j in range(inst.n) if j != i - 1), Fraction(0))
    return expected_rank - inst.base.rank(i)


def _check_max_dsc(inst: ExpInstance) -> None:
    if inst.canonical != MAX_DSC:
        raise ExactIntractable(
            f"EXP({inst.spec}, {inst.effect.kind.value})",
            "positive-CNF model counting reduces to top-k membership via the clause incidence matrix",
        )


def _check_k(k: int, caps: Caps) -> None:
    if k > caps.topk_k and not caps.allow_large_k:
        raise ResourceCapExceeded("topk-k", k, caps.topk_k)


def beats_all(inst: ExpInstance, i: int, others) -> WeightSelection:
    """Weights under which row ``i`` precedes every row in ``others`` (Max descending).

    Competitors are merged column-wise into one row per tie orientation:
    rows with a smaller index must be beaten strictly, the rest may be tied.
    """
    rows = inst.rows
    me = as_competitor(rows[i - 1])
    before = [rows[r - 1] for r in others if r < i]
    after = [rows[r - 1] for r in others if r > i]
    sel = WeightSelection.full(inst.dist)
    if before:
        sel = intersect_selections(sel, max_exceeds(me, merge_rows(before), inst.dist, strict=True))
    if after and sel.terms:
        sel = intersect_selections(sel, max_exceeds(me, merge_rows(after), inst.dist, strict=False))
    return sel


def prob_in_topk(inst: ExpInstance, i: int, k: int) -> Fraction:
    """P(rank of row ``i`` <= k) under Max descending.

    Row ``i`` is in the top k iff it beats at least ``n - k`` other rows. With
    ``S_d`` the sum of P(i beats all of S) over d-subsets S, inclusion-exclusion
    gives P(beats >= t) = sum_{d >= t} (-1)^(d-t) C(d-1, t-1) S_d.
    """
    n = inst.n
    t = n - k
    if t <= 0:
        return Fraction(1)
    others = [r for r in range(1, n + 1) if r != i]
    total = Fraction(0)
    for d in range(t, n):
        s_d = sum(
            (selection_probability(beats_all(inst, i, subset), inst.dist) for subset in itertools.combinations(others, d)),
            Fraction(0),
        )
        total += (-1) ** (d - t) * math.comb(d - 1, t - 1) * s_d
    return total


def expect_topk_membership_maxdsc(
    inst: ExpInstance, i: int | None = None, k: int | None = None, caps: Caps = DEFAULT_CAPS
) -> Fraction:
    i = inst.effect.row if i is None else i
    k = inst.effect.k if k is None else k
    _check_max_dsc(inst)
    _check_k(k, caps)
    return prob_in_topk(inst, i, k) - (1 if inst.base.rank(i) <= k else 0)


def expect_topk_set_maxdsc(
    inst: ExpInstance, k: int | None = None, variant: str = "difference", caps: Caps = DEFAULT_CAPS
) -> Fraction:
    """Expected top-k symmetric difference or any-change indicator (Max descending)."""
    k = inst.effect.k if k is None else k
    _check_max_dsc(inst)
    _check_k(k, caps)
    top0 = inst.base.order[:k]
    if variant == "difference":
        kept = sum((prob_in_topk(inst, t, k) for t in top0), Fraction(0))
        return 2 * k - 2 * kept
    if variant != "anychange":
        raise InvalidInput(f"unknown top-k variant {variant!r}")
    outside = [r for r in range(1, inst.n + 1) if r not in top0]
    if not outside:
        return Fraction(0)
    sel = WeightSelection.full(inst.dist)
    for t in top0:
        sel = intersect_selections(sel, beats_all(inst, t, outside))
        if not sel.terms:
            break
    return 1 - selection_probability(sel, inst.dist)


def expect_enumerate_weights(inst: ExpInstance, caps: Caps = DEFAULT_CAPS) -> Fraction:
    size = inst.dist.space_size
    if size > caps.weight_space:
        raise ResourceCapExceeded("weight-space", size, caps.weight_space)
    ctx = inst.context()
    total = Fraction(0)
    for u, p in inst.dist.outcomes():
        total += p * ctx(rank_matrix(apply_weights(inst.M, u), inst.spec))
    return total


def permutation_probability_sum_dp(
    M: Matrix,
    dist: ProductDistribution,
    order,
    tie_pattern=None,
    max_states: int = DEFAULT_DP_STATES,
) -> Fraction:
    """Probability that ascending Sum ranking produces exactly ``order``.

    Tracks, column by column, the score differences of the n-1 consecutive
    pairs of ``order``. ``tie_pattern[i]`` says whether the i-th pair may be
    tied (the earlier row wins ties); it defaults to comparing row indices.
    Entries and weights must be integers.
    """
    order = tuple(order.order if isinstance(order, Permutation) else order)
    rows = M.rows
    if sorted(order) != list(range(1, M.n + 1)):
        raise InvalidInput(f"{order} is not a permutation of the {M.n} rows")
    if not M.is_integral() or any(v.denominator != 1 for c in dist.columns for v in c.values):
        raise InvalidInput("unary Sum computation needs integer entries and weights")
    pairs = list(zip(order, order[1:]))
    if tie_pattern is None:
        tie_pattern = [a < b for a, b in pairs]
    if len(tie_pattern) != len(pairs):
        raise InvalidInput("tie pattern needs one flag per consecutive pair")
    deltas = [[rows[b - 1][j] - rows[a - 1][j] for a, b in pairs] for j in range(M.m)]

    # remaining[j][i]: range of what columns j.. can still add to axis i
    remaining = [[(0, 0)] * len(pairs) for _ in range(M.m + 1)]
    for j in range(M.m - 1, -1, -1):
        vals = dist.columns[j].values
        remaining[j] = [
            (lo + min(v * deltas[j][i] for v in vals), hi + max(v * deltas[j][i] for v in vals))
            for i, (lo, hi) in enumerate(remaining[j + 1])
        ]

    def feasible(state, j) -> bool:
        for i, s in enumerate(state):
            best = s + remaining[j][i][1]
            if best < 0 or (best == 0 and not tie_pattern[i]):
                return False
        return True

    layer = {tuple(Fraction(0) for _ in pairs): Fraction(1)}
    for j, col in enumerate(dist.columns):
        nxt: dict[tuple, Fraction] = {}
        for state, p in layer.items():
            for v, q in col.support:
                s = tuple(a + v * d for a, d in zip(state, deltas[j]))
                if feasible(s, j + 1):
                    nxt[s] = nxt.get(s, Fraction(0)) + p * q
        if len(nxt) > max_states:
            raise ResourceCapExceeded("dp-states", len(nxt), max_states)
        layer = nxt
    return sum(layer.values(), Fraction(0))


def permutation_distribution(inst: ExpInstance, caps: Caps = DEFAULT_CAPS) -> Iterator[tuple[Permutation, Fraction]]:
    """Every permutation of the rows with nonzero probability, and that probability."""
    n = inst.n
    if n > caps.permutation_rows:
        raise ResourceCapExceeded("permutation-rows", n, caps.permutation_rows)
    canonical = inst.canonical
    rows = inst.rows
    if canonical.score is Score.SUM:
        if inst.encoding is Encoding.BINARY:
            raise _sum_binary_error(inst)
        pair = _Pairs(inst, caps)
        M = Matrix(rows, inst.M.m)
        for order in itertools.permutations(range(1, n + 1)):
            if any(pair(a - 1, b - 1) == 0 for a, b in zip(order, order[1:])):
                continue
            p = permutation_probability_sum_dp(M, inst.dist, order, max_states=caps.dp_states)
            if p:
                yield Permutation(order), p
        return

    selections = {
        (a, b): prec_selection(rows[a], rows[b], inst.dist, canonical, Tie.by_index(a, b))
        for a in range(n)
        for b in range(n)
        if a != b
    }

    def extend(prefix: list[int], sel: WeightSelection):
        if len(prefix) == n:
            yield Permutation(tuple(r + 1 for r in prefix)), selection_probability(sel, inst.dist)
            return
        for b in range(n):
            if b in prefix:
                continue
            nxt = intersect_selections(sel, selections[prefix[-1], b]) if prefix else sel
            if nxt.terms:
                yield from extend(prefix + [b], nxt)

    for pi, p in extend([], WeightSelection.full(inst.dist)):
        if p:
            yield pi, p


def expect_enumerate_permutations(inst: ExpInstance, caps: Caps = DEFAULT_CAPS) -> Fraction:
    ctx = inst.context()
    return sum((p * ctx(pi) for pi, p in permutation_distribution(inst, caps)), Fraction(0))


def _hard_cell(inst: ExpInstance, caps: Caps) -> ExactIntractable | None:
    """The hardness reason for this instance's cell, or None if it is polynomial."""
    kind = inst.effect.kind
    canonical = inst.canonical
    cell = f"EXP({inst.spec}, {inst.effect})"
    if canonical.score is Score.SUM and inst.encoding is Encoding.BINARY:
        return _sum_binary_error(inst)
    if kind in (EffectKind.KENDALL_TAU, EffectKind.POSITION):
        return None
    if kind in (EffectKind.MAX_DISPLACEMENT, EffectKind.HAMMING):
        return ExactIntractable(
            cell, "positive-CNF model counting reduces to the difference of two displacement expectations"
        )
    if canonical != MAX_DSC:
        return ExactIntractable(
            cell, "positive-CNF model counting reduces to top-k membership via the clause incidence matrix"
        )
    if inst.effect.k > caps.topk_k and not caps.allow_large_k:
        return ExactIntractable(
            cell + f" with k={inst.effect.k} > fixed-parameter cap {caps.topk_k}",
            "with k part of the input, Max descending top-k is as hard as Max ascending",
        )
    return None


def _specialized(inst: ExpInstance, caps: Caps) -> tuple[Fraction, Method]:
    kind = inst.effect.kind
    if kind is EffectKind.KENDALL_TAU:
        return expect_kendall_tau(inst, caps), Method.PAIRWISE
    if kind is EffectKind.POSITION:
        return expect_position(inst, caps=caps), Method.PAIRWISE
    if kind is EffectKind.TOPK_MEMBERSHIP:
        return expect_topk_membership_maxdsc(inst, caps=caps), Method.INCLUSION_EXCLUSION
    variant = "difference" if kind is EffectKind.TOPK_DIFFERENCE else "anychange"
    return expect_topk_set_maxdsc(inst, variant=variant, caps=caps), Method.INCLUSION_EXCLUSION


def _bounded(inst: ExpInstance, caps: Caps) -> tuple[Fraction, Method] | None:
    if inst.dist.space_size <= caps.weight_space:
        return expect_enumerate_weights(inst, caps), Method.ENUMERATE_WEIGHTS
    if inst.n <= caps.permutation_rows:
        if inst.canonical.score is not Score.SUM:
            return expect_enumerate_permutations(inst, caps), Method.ENUMERATE_PERMUTATIONS
        integral = inst.M.is_integral() and all(v.denominator == 1 for c in inst.dist.columns for v in c.values)
        if inst.encoding is Encoding.UNARY and integral:
            return expect_enumerate_permutations(inst, caps), Method.PERMUTATION_DP
    return None


def expect_effect(inst: ExpInstance, mode: str = "exact", caps: Caps = DEFAULT_CAPS) -> tuple[Fraction, Method]:
    """Exact expected effect and the method that produced it.

    ``exact`` uses only the algorithm that is polynomial for the cell and
    raises :class:`ExactIntractable` for hard cells. ``auto`` additionally
    falls back to enumerating weight vectors or permutations when the
    product space or the row count is within the caps.
    """
    if mode not in ("exact", "auto"):
        raise InvalidInput(f"unknown mode {mode!r}")
    hard = _hard_cell(inst, caps)
    if hard is None:
        try:
            return _specialized(inst, caps)
        except (ResourceCapExceeded, InvalidInput):
            if mode == "exact":
                raise
            fallback = _bounded(inst, caps)
            if fallback is None:
                raise
            return fallback
    if mode == "auto":
        fallback = _bounded(inst, caps)
        if fallback is not None:
            return fallback
    raise hard
