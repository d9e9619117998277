import math
import random
from fractions import Fraction

import pytest

from helpers import random_matrix, worked_dist, worked_matrix
from rankexplain.approx import (
    BATCH_SIZE,
    SamplingPlan,
    hoeffding_samples,
    mc_expectation,
    mc_shap,
    mc_shapley,
)
from rankexplain.attribution import ShapInstance
from rankexplain.core import Matrix, Permutation, ProductDistribution
from rankexplain.errors import InvalidInput
from rankexplain.expectation import ExpInstance
from rankexplain.oracle import brute_expectation, brute_shapley
from rankexplain.ranking import MAX_ASC, SUM, SUM_DSC, EffectSpec

F = Fraction
KT = EffectSpec("kendall_tau")


def worked_exp():
    return ExpInstance(worked_matrix(), worked_dist(), SUM_DSC, KT, Permutation((1, 2, 3, 4)))


def test_hoeffding_formula():
    assert hoeffding_samples(F(6), F(1, 20), F(1, 100)) == math.ceil(36 * math.log(200) / (2 / 400))
    assert hoeffding_samples(F(0), F(1, 20), F(1, 100)) == 1
    assert hoeffding_samples(F(1), F(1, 10), F(1, 2)) == math.ceil(math.log(4) * 50)


def test_plan_validation_and_resolution():
    for bad in ({"epsilon": 0}, {"delta": 1}, {"delta": 0}, {"seed": -1}, {"samples": 0}):
        with pytest.raises(InvalidInput):
            SamplingPlan(**bad)
    plan = SamplingPlan().resolved(F(2))
    assert plan.samples == hoeffding_samples(F(2), F(1, 20), F(1, 100)) and plan.width == 2
    assert SamplingPlan(samples=7).resolved(F(2)).samples == 7
    d = plan.to_dict()
    assert d["epsilon"] == "1/20" and d["rng"] == "numpy.PCG64"


def test_point_mass_is_estimated_exactly():
    inst = ExpInstance(worked_matrix(), ProductDistribution.point((1, 2)), SUM_DSC, KT, Permutation((1, 2, 3, 4)))
    assert mc_expectation(inst, SamplingPlan(samples=50)).value == 3


def test_estimates_are_deterministic_and_thread_independent():
    plan = SamplingPlan(seed=9, samples=3 * BATCH_SIZE + 17)
    a = mc_expectation(worked_exp(), plan)
    assert a == mc_expectation(worked_exp(), plan)
    assert a.value == mc_expectation(worked_exp(), plan, threads=4).value
    assert a.value != mc_expectation(worked_exp(), SamplingPlan(seed=10, samples=plan.samples)).value
    shap = ShapInstance(worked_matrix(), worked_dist(), (1, 1), SUM_DSC, KT, 1)
    assert mc_shap(shap, plan).value == mc_shap(shap, plan, threads=3).value


def test_expectation_within_epsilon():
    est = mc_expectation(worked_exp(), SamplingPlan(seed=1))
    assert abs(est.value - F(3, 2)) <= F(1, 20)
    assert est.plan.width == 6


def test_shap_edge_cases():
    point = ShapInstance(worked_matrix(), ProductDistribution.point((1, 1)), (1, 1), SUM_DSC, KT, 2)
    assert mc_shap(point, SamplingPlan(samples=100)).value == 0
    with pytest.raises(InvalidInput):
        mc_shap(ShapInstance(point.M, point.dist, point.w, SUM_DSC, KT), SamplingPlan())


def test_shap_within_epsilon():
    inst = ShapInstance(worked_matrix(), worked_dist(), (1, 1), SUM_DSC, EffectSpec("position", row=4), 2)
    est = mc_shap(inst, SamplingPlan(seed=2))
    assert abs(est.value - F(-9, 8)) <= F(1, 20)
    # a marginal contribution is a difference of two effects
    assert est.plan.width == 12


def test_single_column_shapley_is_exact():
    assert mc_shapley(Matrix.of([[2], [1]]), SUM, KT, 1, SamplingPlan(samples=40)).value == 1


def test_identical_columns_agree():
    M = Matrix.of([[3, 3, 1], [1, 1, 2], [2, 2, 0]])
    a = mc_shapley(M, SUM, KT, 1, SamplingPlan(seed=3)).value
    b = mc_shapley(M, SUM, KT, 2, SamplingPlan(seed=4)).value
    assert abs(a - b) <= F(1, 10)


@pytest.mark.parametrize("seed", range(3))
def test_random_shapley_within_epsilon(seed):
    rng = random.Random(seed)
    M = random_matrix(rng, 4, 3, -3, 4)
    est = mc_shapley(M, MAX_ASC, KT, 2, SamplingPlan(seed=seed, epsilon=F(1, 10)))
    assert abs(est.value - brute_shapley(M, MAX_ASC, KT, 2)) <= F(1, 10)


def test_error_shrinks_with_samples():
    # mean absolute error over seeds should fall roughly like 1/sqrt(N)
    exact = brute_expectation(worked_exp())
    errors = []
    for n in (100, 6400):
        errs = [abs(mc_expectation(worked_exp(), SamplingPlan(seed=s, samples=n)).value - exact) for s in range(20)]
        errors.append(sum(errs) / len(errs))
    assert errors[1] < errors[0] / 4
