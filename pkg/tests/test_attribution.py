import itertools
import random
from fractions import Fraction

import pytest
import sympy

from helpers import random_dist, random_effect, random_matrix, worked_dist, worked_matrix
from rankexplain.attribution import (
    ShapInstance,
    shap_all,
    shap_attribution,
    shapley_all,
    shapley_attribution,
    shapley_column,
    shapley_matrix,
    solve_exact,
    stratified_deltas,
)
from rankexplain.core import Matrix, Permutation, ProductDistribution, restrict_columns
from rankexplain.errors import ExactIntractable, InvalidInput
from rankexplain.expectation import ExpInstance, expect_effect
from rankexplain.golden import WORKED_EXAMPLE_VALUES
from rankexplain.oracle import brute_shap, brute_shapley
from rankexplain.ranking import (
    ALL_SPECS,
    LEX,
    MAX_ASC,
    MAX_DSC,
    MIN_DSC,
    SUM,
    SUM_DSC,
    EffectContext,
    EffectSpec,
    rank_matrix,
)

F = Fraction
KT = EffectSpec("kendall_tau")


def worked(effect, target=None):
    return ShapInstance(worked_matrix(), worked_dist(), (1, 1), SUM_DSC, effect, target)


def test_worked_example_shap_kendall_tau():
    assert shap_all(worked(KT)) == (F(3, 4), F(3, 4))
    a = shap_attribution(worked(KT, 1))
    assert a.method == "exact:interpolation+pairwise"


def test_worked_example_shap_position():
    assert shap_all(worked(EffectSpec("position", row=4))) == (F(3, 8), F(-9, 8))


@pytest.mark.parametrize("key", list(WORKED_EXAMPLE_VALUES), ids=str)
def test_worked_example_all_effects(key):
    kind, row, k = key
    effect = EffectSpec(kind, row, k)
    _, shap_vals, shapley_vals = WORKED_EXAMPLE_VALUES[key]
    assert shap_all(worked(effect), mode="auto") == shap_vals
    assert shapley_all(worked_matrix(), SUM_DSC, effect, mode="auto") == shapley_vals


def test_single_coalition_value_of_worked_example():
    # nu({2}) for Kendall tau: weight 2 pinned to 1, weight 1 free
    M, dist = worked_matrix(), worked_dist()
    pinned = dist.replace(2, dist.columns[1].mixed_with_point(F(1), F(1)))
    inst = ExpInstance(M, pinned, SUM_DSC, KT, rank_matrix(M, SUM_DSC))
    assert -expect_effect(inst)[0] == F(-3, 2)


def test_point_mass_distribution_gives_zero():
    inst = ShapInstance(worked_matrix(), ProductDistribution.point((1, 1)), (1, 1), SUM_DSC, KT)
    assert shap_all(inst) == (0, 0)


def test_reference_weights_must_have_positive_probability():
    with pytest.raises(InvalidInput):
        ShapInstance(worked_matrix(), worked_dist(), (1, 3), SUM_DSC, KT)


def test_single_column_shapley():
    M = Matrix.of([[2], [1]])
    assert shapley_column(M, SUM, KT, 1) == 1


def test_identical_columns_share_shapley_value():
    M = Matrix.of([[3, 3, 1], [1, 1, 2], [2, 2, 0]])
    for spec in (SUM, MAX_ASC, LEX):
        values = shapley_all(M, spec, KT)
        assert values[0] == values[1]


def test_max_shift_keeps_restricted_rankings():
    rng = random.Random(4)
    for spec in (MAX_ASC, MAX_DSC, MIN_DSC):
        M = random_matrix(rng, 4, 3, -5, 5)
        T, canonical, shift = shapley_matrix(M, spec)
        assert shift >= 0 and min(T.entries()) >= 0
        for r in range(4):
            for C in itertools.combinations(range(1, 4), r):
                ones = tuple(F(int(j in C)) for j in range(1, 4))
                from rankexplain.core import apply_weights

                assert rank_matrix(apply_weights(T, ones), canonical) == rank_matrix(restrict_columns(M, C), spec)


def test_max_shift_is_reported():
    M = Matrix.of([[-3, 1], [2, -1]])
    a = shapley_attribution(M, MAX_ASC, KT, 1)
    assert a.shift == 3 and a.value == brute_shapley(M, MAX_ASC, KT, 1)


def test_rational_sum_matrix_is_scaled():
    M = Matrix.of([["1/2", "1/3"], ["1/4", 1]])
    assert shapley_column(M, SUM, KT, 2) == brute_shapley(M, SUM, KT, 2)


def test_hard_cells_are_refused_exactly():
    with pytest.raises(ExactIntractable):
        shap_attribution(worked(EffectSpec("hamming"), 1))
    with pytest.raises(ExactIntractable):
        shapley_column(worked_matrix(), SUM_DSC, EffectSpec("max_displacement"), 1)


def test_solve_exact_matches_sympy():
    A = [[F(1, 2), F(1, 3)], [F(1, 4), F(-1)]]
    b = [F(1), F(2, 5)]
    x = solve_exact(A, b)
    assert all(sum(a * v for a, v in zip(row, x)) == rhs for row, rhs in zip(A, b))
    expected = sympy.Matrix([[sympy.Rational(1, 2), sympy.Rational(1, 3)], [sympy.Rational(1, 4), -1]]).inv() * sympy.Matrix(
        [1, sympy.Rational(2, 5)]
    )
    assert x == [F(int(v.p), int(v.q)) for v in expected]


def test_stratified_deltas_are_grid_independent_and_sum_marginals():
    rng = random.Random(11)
    M = random_matrix(rng, 4, 3)
    dist = random_dist(rng, 3, lo=0, hi=3)
    w = tuple(col.values[0] for col in dist.columns)
    inst = ShapInstance(M, dist, w, MAX_ASC, KT, 2)
    default = stratified_deltas(inst)
    assert stratified_deltas(inst, grid=(F(1, 7), F(2, 3), F(9, 10))) == default
    with pytest.raises(InvalidInput):
        stratified_deltas(inst, grid=(F(1, 2), F(1, 2), F(1, 3)))
    # Delta_k is the sum over k-coalitions of marginal contributions of the conditional game
    base = rank_matrix(M.__class__(tuple(tuple(a * b for a, b in zip(r, w)) for r in M.rows), 3), MAX_ASC)
    ctx = EffectContext(base, KT)
    outcomes = list(dist.outcomes())

    def nu(C):
        num = den = F(0)
        for u, p in outcomes:
            if all(u[j] == w[j] for j in C):
                num -= p * ctx(rank_matrix(M.__class__(tuple(tuple(a * b for a, b in zip(r, u)) for r in M.rows), 3), MAX_ASC))
                den += p
        return num / den

    others = [0, 2]
    for k in range(3):
        expected = sum((nu(set(C) | {1}) - nu(set(C)) for C in itertools.combinations(others, k)), F(0))
        assert default[k] == expected


def _random_shap_instance(rng, m_max=4, lo=-2, hi=3):
    n, m = rng.randint(2, 4), rng.randint(1, m_max)
    M = random_matrix(rng, n, m)
    dist = random_dist(rng, m, max_support=2, lo=lo, hi=hi)
    w = tuple(rng.choice(col.values) for col in dist.columns)
    return ShapInstance(M, dist, w, rng.choice(ALL_SPECS), random_effect(rng, n))


@pytest.mark.parametrize("seed", range(12))
def test_shap_matches_oracle_and_efficiency(seed):
    rng = random.Random(seed)
    inst = _random_shap_instance(rng)
    values = shap_all(inst, mode="auto")
    assert values == tuple(brute_shap(inst.with_target(j)) for j in range(1, inst.M.m + 1))
    free = ExpInstance(inst.M, inst.dist, inst.spec, inst.effect, rank_matrix(
        inst.M.__class__(tuple(tuple(a * b for a, b in zip(r, inst.w)) for r in inst.M.rows), inst.M.m), inst.spec))
    # f(w) = 0, so the scores sum to -E[f] = E[effect]
    assert sum(values) == expect_effect(free, "auto")[0]


@pytest.mark.parametrize("seed", range(12))
def test_shapley_matches_oracle_and_efficiency(seed):
    rng = random.Random(100 + seed)
    n, m = rng.randint(2, 5), rng.randint(1, 5)
    M = random_matrix(rng, n, m)
    spec = rng.choice(ALL_SPECS)
    effect = random_effect(rng, n)
    values = shapley_all(M, spec, effect, mode="auto")
    assert values == tuple(brute_shapley(M, spec, effect, j) for j in range(1, m + 1))
    ctx = EffectContext(rank_matrix(M, spec), effect)
    assert sum(values) == ctx(Permutation.identity(n)) - ctx(rank_matrix(M, spec))
