import itertools
import random
from fractions import Fraction

import pytest

from rankexplain.core import Permutation, ProductDistribution, apply_weights, restrict_columns
from rankexplain.errors import InvalidInput
from rankexplain.expectation import ExpInstance, expect_enumerate_weights
from rankexplain.oracle import count_knapsack, count_sat_positive_cnf
from rankexplain.pairwise import Tie, prec_probability
from rankexplain.ranking import LEX, MAX_ASC, MAX_DSC, SUM, EffectSpec, rank_matrix
from rankexplain.reductions import (
    KnapsackInstance,
    PositiveCNF,
    gen_cnf_topk_matrix,
    gen_knapsack_matrix,
    gen_md_matrix_pair,
)

F = Fraction
TEN_MODELS = PositiveCNF.of(4, [{1, 2, 4}, {1, 3}, {2, 3, 4}])


def subsets(m):
    for r in range(m + 1):
        yield from itertools.combinations(range(1, m + 1), r)


def random_cnf(rng, m, clauses):
    return PositiveCNF.of(m, [rng.sample(range(1, m + 1), rng.randint(1, min(m, 3))) for _ in range(clauses)])


def test_knapsack_matrix_layout():
    assert gen_knapsack_matrix(KnapsackInstance((1, 2), 2)).rows == ((0, 0, 3), (1, 2, 0))
    assert gen_knapsack_matrix(KnapsackInstance((), 4)).rows == ((5,), (0,))


def test_knapsack_values_must_be_natural():
    with pytest.raises(InvalidInput):
        KnapsackInstance((1, -2), 3)


@pytest.mark.parametrize("seed", range(6))
def test_knapsack_matrix_selects_solutions(seed):
    rng = random.Random(seed)
    b = tuple(rng.randint(0, 6) for _ in range(rng.randint(0, 10)))
    d = rng.randint(0, 12)
    M = gen_knapsack_matrix(KnapsackInstance(b, d))
    l = len(b)
    for C in subsets(l + 1):
        ones = [F(int(j in C)) for j in range(1, l + 2)]
        second_first = rank_matrix(apply_weights(M, ones), SUM).rank(2) == 1
        # the tie goes to row 1, so row 2 leads exactly when the score is strictly smaller
        fits = (l + 1) in C and sum(b[i - 1] for i in C if i <= l) <= d
        assert second_first == fits
    p = prec_probability(M.row(2), M.row(1), ProductDistribution.uniform([0, 1], l + 1), SUM, Tie.SECOND)
    assert 2 ** (l + 1) * p == count_knapsack(b, d)


def test_cnf_matrix_layout():
    assert gen_cnf_topk_matrix(TEN_MODELS, 1).rows == ((1, 1, 0, 1), (1, 0, 1, 0), (0, 1, 1, 1), (0, 0, 0, 0))
    M = gen_cnf_topk_matrix(TEN_MODELS, 3)
    assert M.n == 6 and M.rows[0] == M.rows[1] == M.rows[5] == (0, 0, 0, 0)
    with pytest.raises(InvalidInput):
        gen_cnf_topk_matrix(TEN_MODELS, 0)


def _top_k_probability(phi, k, spec):
    M = gen_cnf_topk_matrix(phi, k)
    effect = EffectSpec("topk_membership", row=M.n, k=k)
    inst = ExpInstance(M, ProductDistribution.uniform([0, 1], phi.n_vars), spec, effect, Permutation.identity(M.n))
    # the base ranks the distinguished row below k unless it is the only non-padding row
    return expect_enumerate_weights(inst) + (1 if M.n <= k else 0)


@pytest.mark.parametrize("spec", [MAX_ASC, SUM, LEX], ids=str)
def test_cnf_matrix_counts_models_on_ten_model_formula(spec):
    assert _top_k_probability(TEN_MODELS, 1, spec) == F(10, 16)


def test_empty_formula_puts_the_row_on_top():
    assert _top_k_probability(PositiveCNF.of(3, []), 1, MAX_ASC) == 1


def test_cnf_matrix_fails_for_max_descending():
    # the encoding relies on ascending comparison; under Max dsc the count is not recovered in general
    assert _top_k_probability(TEN_MODELS, 1, MAX_DSC) != F(10, 16)


@pytest.mark.parametrize("seed", range(4))
def test_cnf_matrix_counts_models_randomly(seed):
    rng = random.Random(seed)
    phi = random_cnf(rng, rng.randint(1, 7), rng.randint(1, 5))
    k = rng.randint(1, 3)
    for spec in (MAX_ASC, SUM, LEX):
        assert 2**phi.n_vars * _top_k_probability(phi, k, spec) == count_sat_positive_cnf(phi)


def _md(p, q):
    return max(abs(a - b) for a, b in zip(p.ranks, q.ranks))


def _ham(p, q):
    return sum(a != b for a, b in zip(p.ranks, q.ranks))


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("spec", [MAX_ASC, SUM, LEX], ids=str)
def test_md_pair_difference_identity(seed, spec):
    rng = random.Random(seed)
    phi = random_cnf(rng, rng.randint(1, 6), rng.randint(1, 4))
    M1, M2 = gen_md_matrix_pair(phi, spec)
    l = len(phi.clauses)
    assert (M1.n, M2.n) == (2 * l + 1, 2 * l + 2)
    assert set(M2.entries()) <= {0, 1}
    for C in subsets(phi.n_vars):
        expected = 0 if phi.satisfied_by(C) else 1
        for dist in (_md, _ham):
            d1 = dist(rank_matrix(M1, spec), rank_matrix(restrict_columns(M1, C), spec))
            d2 = dist(rank_matrix(M2, spec), rank_matrix(restrict_columns(M2, C), spec))
            assert d2 - d1 == expected


def test_md_pair_rejects_other_rankings():
    with pytest.raises(InvalidInput):
        gen_md_matrix_pair(TEN_MODELS, MAX_DSC)


def test_positive_cnf_validation():
    with pytest.raises(InvalidInput):
        PositiveCNF.of(3, [set()])
    with pytest.raises(InvalidInput):
        PositiveCNF.of(3, [{4}])
    assert TEN_MODELS.satisfied_by({1, 2}) and not TEN_MODELS.satisfied_by({4})
