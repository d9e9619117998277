"""SHAP scores of weight parameters and Shapley values of columns.

Both are computed from exact expectations. For a player ``j`` let every
other column ``l`` follow ``theta * delta(w_l) + (1 - theta) * Pi_l``; the
gap between pinning ``u_j = w_j`` and drawing it freely is then the
polynomial ``g(theta) = sum_k Delta_k theta^k (1 - theta)^(m-1-k)`` whose
coefficients are the coalition-size-stratified marginal contributions.
Evaluating ``g`` at ``m`` rational points and solving the linear system
exactly recovers the ``Delta_k``; the Shapley formula weights them by
``k! (m-1-k)! / m!``.

Column Shapley values reuse the same machinery with reference weights all
one and every column otherwise switched off (weight 0), so that the mixture
ranges over exactly the coalitions of columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import sympy

from .core import (
    ColumnDistribution,
    Matrix,
    ProductDistribution,
    WeightVector,
    apply_weights,
    check_column,
    weight_vector,
)
from .errors import InvalidInput
from .expectation import DEFAULT_CAPS, Caps, ExpInstance, Method, expect_effect
from .pairwise import Encoding
from .ranking import EffectSpec, RankingSpec, Score, normalize, rank_matrix


@dataclass(frozen=True)
class ShapInstance:
    """Matrix, weight distribution, reference weights ``w``, ranking, effect and target column."""

    M: Matrix
    dist: ProductDistribution
    w: WeightVector
    spec: RankingSpec
    effect: EffectSpec
    target: int | None = None
    encoding: Encoding = Encoding.UNARY

    def __post_init__(self) -> None:
        object.__setattr__(self, "w", weight_vector(self.w))
        self.dist.check_width(self.M.m)
        if len(self.w) != self.M.m:
            raise InvalidInput(f"reference weights have length {len(self.w)}, matrix has {self.M.m} columns")
        if not self.dist.contains(self.w):
            raise InvalidInput(f"reference weights {self.w} have probability zero")
        if self.target is not None:
            check_column(self.target, self.M.m)
        self.effect.validate(self.M.n)

    def with_target(self, j: int) -> ShapInstance:
        return ShapInstance(self.M, self.dist, self.w, self.spec, self.effect, j, self.encoding)


@dataclass(frozen=True)
class Attribution:
    """An attribution value with the exact methods that produced it.

    ``shift`` is the constant added to every entry before a Max-based
    column Shapley computation (0 when none was needed).
    """

    value: Fraction
    methods: frozenset[Method]
    shift: Fraction = Fraction(0)

    @property
    def method(self) -> str:
        names = sorted("pairwise" if m is Method.PAIRWISE else m.value for m in self.methods)
        return "exact:interpolation+" + "+".join(names)


def theta_grid(m: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(t, m + 1) for t in range(1, m + 1))


def solve_exact(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Solve ``A x = b`` over the rationals."""
    x = sympy.Matrix(A).LUsolve(sympy.Matrix(b))
    return [Fraction(int(v.p), int(v.q)) for v in x]


def stratum_weights(m: int) -> tuple[Fraction, ...]:
    """Shapley weight ``k! (m-1-k)! / m!`` of a coalition of size k, for k = 0..m-1."""
    return tuple(
        Fraction(math.factorial(k) * math.factorial(m - 1 - k), math.factorial(m)) for k in range(m)
    )


def _mixed(dist: ProductDistribution, w: WeightVector, j: int, theta: Fraction, pin_j: bool) -> ProductDistribution:
    cols = []
    for l, col in enumerate(dist.columns):
        if l == j - 1:
            cols.append(ColumnDistribution.point(w[l]) if pin_j else col)
        else:
            cols.append(col.mixed_with_point(w[l], theta))
    return ProductDistribution(tuple(cols))


def _stratified_deltas(
    M: Matrix,
    dist: ProductDistribution,
    w: WeightVector,
    spec: RankingSpec,
    effect: EffectSpec,
    j: int,
    encoding: Encoding,
    mode: str,
    caps: Caps,
    grid: tuple[Fraction, ...] | None = None,
) -> tuple[list[Fraction], set[Method]]:
    m = M.m
    grid = theta_grid(m) if grid is None else tuple(grid)
    if len(grid) != m or len(set(grid)) != m or any(not 0 < t < 1 for t in grid):
        raise InvalidInput(f"need {m} distinct mixing weights strictly between 0 and 1")
    base = rank_matrix(apply_weights(M, w), spec)
    methods: set[Method] = set()
    A, g = [], []
    for theta in grid:
        values = []
        for pin in (True, False):
            inst = ExpInstance(M, _mixed(dist, w, j, theta, pin), spec, effect, base, encoding)
            value, method = expect_effect(inst, mode, caps)
            methods.add(method)
            values.append(value)
        # f = -effect, so E_pinned[f] - E_free[f] = E_free[e] - E_pinned[e]
        g.append(values[1] - values[0])
        A.append([theta**k * (1 - theta) ** (m - 1 - k) for k in range(m)])
    return solve_exact(A, g), methods


def _shap_value(
    M, dist, w, spec, effect, j, encoding=Encoding.UNARY, mode="exact", caps=DEFAULT_CAPS
) -> tuple[Fraction, set[Method]]:
    deltas, methods = _stratified_deltas(M, dist, w, spec, effect, j, encoding, mode, caps)
    value = sum((c * d for c, d in zip(stratum_weights(M.m), deltas)), Fraction(0))
    return value, methods


def stratified_deltas(
    inst: ShapInstance, mode: str = "exact", caps: Caps = DEFAULT_CAPS, grid: tuple[Fraction, ...] | None = None
) -> tuple[Fraction, ...]:
    """``Delta_k``: summed marginal contributions of the target over coalitions of size k.

    ``grid`` holds the m mixing weights at which the gap polynomial is
    sampled; any distinct values in (0, 1) give the same result.
    """
    if inst.target is None:
        raise InvalidInput("stratified deltas need a target column")
    deltas, _ = _stratified_deltas(
        inst.M, inst.dist, inst.w, inst.spec, inst.effect, inst.target, inst.encoding, mode, caps, grid
    )
    return tuple(deltas)


def shap_attribution(inst: ShapInstance, mode: str = "exact", caps: Caps = DEFAULT_CAPS) -> Attribution:
    if inst.target is None:
        raise InvalidInput("SHAP score needs a target column")
    value, methods = _shap_value(
        inst.M, inst.dist, inst.w, inst.spec, inst.effect, inst.target, inst.encoding, mode, caps
    )
    return Attribution(value, frozenset(methods))


def shap_score(inst: ShapInstance, mode: str = "exact", caps: Caps = DEFAULT_CAPS) -> Fraction:
    """SHAP score of weight ``inst.target`` for the game ``C -> E[-effect | u_C = w_C]``.

    The base permutation of the effect is the ranking under ``w``.
    """
    return shap_attribution(inst, mode, caps).value


def shap_all(inst: ShapInstance, mode: str = "exact", caps: Caps = DEFAULT_CAPS) -> tuple[Fraction, ...]:
    return tuple(shap_score(inst.with_target(j), mode, caps) for j in range(1, inst.M.m + 1))


def shapley_matrix(M: Matrix, spec: RankingSpec) -> tuple[Matrix, RankingSpec, Fraction]:
    """A matrix and canonical spec for which zeroing a column equals dropping it.

    Returns the transformed matrix, its canonical spec and the shift that was
    added to make a Max-ranked matrix non-negative. Sum matrices are scaled
    to integers so that the unary dynamic program applies.
    """
    M, canonical = normalize(M, spec)
    shift = Fraction(0)
    if M.m == 0:
        return M, canonical, shift
    if canonical.score is Score.MAX:
        low = min(M.entries())
        if low < 0:
            shift = -low
            M = M.shifted(shift)
    elif canonical.score is Score.SUM and not M.is_integral():
        scale = math.lcm(*(v.denominator for v in M.entries()))
        M = Matrix(tuple(tuple(v * scale for v in r) for r in M.rows), M.m)
    return M, canonical, shift


def shapley_attribution(
    M: Matrix, spec: RankingSpec, effect: EffectSpec, j: int, mode: str = "exact", caps: Caps = DEFAULT_CAPS
) -> Attribution:
    check_column(j, M.m)
    effect.validate(M.n)
    T, canonical, shift = shapley_matrix(M, spec)
    off = ProductDistribution(tuple(ColumnDistribution.point(0) for _ in range(M.m)))
    ones = tuple(Fraction(1) for _ in range(M.m))
    value, methods = _shap_value(T, off, ones, canonical, effect, j, Encoding.UNARY, mode, caps)
    return Attribution(value, frozenset(methods), shift)


def shapley_column(
    M: Matrix, spec: RankingSpec, effect: EffectSpec, j: int, mode: str = "exact", caps: Caps = DEFAULT_CAPS
) -> Fraction:
    """Shapley value of column ``j`` for ``C -> -effect(rank(M restricted to C))``, base ``rank(M)``.

    The empty coalition keeps its value ``-effect(identity)``; it is not
    renormalized to zero.
    """
    return shapley_attribution(M, spec, effect, j, mode, caps).value


def shapley_all(
    M: Matrix, spec: RankingSpec, effect: EffectSpec, mode: str = "exact", caps: Caps = DEFAULT_CAPS
) -> tuple[Fraction, ...]:
    return tuple(shapley_column(M, spec, effect, j, mode, caps) for j in range(1, M.m + 1))
