"""Seeded Monte-Carlo estimators with additive (epsilon, delta) guarantees.

Samples are drawn in fixed-size batches, each from its own PCG64 stream
spawned from the plan's seed, so an estimate depends only on the instance and
the plan and never on how many worker threads ran the batches. Sampled
configurations are tallied first and each distinct one is evaluated once; the
estimate is the exact rational mean.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .attribution import ShapInstance
from .core import Matrix, ProductDistribution, apply_weights, format_rational, restrict_columns, to_rational
from .errors import InvalidInput
from .expectation import ExpInstance
from .ranking import EffectContext, EffectSpec, RankingSpec, effect_range, rank_matrix

RNG_ALGORITHM = "numpy.PCG64"
BATCH_SIZE = 4096


def hoeffding_samples(width: Fraction, epsilon: Fraction, delta: Fraction) -> int:
    """Samples needed so the mean of variables in an interval of ``width`` is within epsilon w.p. 1 - delta."""
    if width == 0:
        return 1
    return math.ceil(float(width) ** 2 * math.log(2 / float(delta)) / (2 * float(epsilon) ** 2))


@dataclass(frozen=True)
class SamplingPlan:
    """Accuracy target, seed and sample count of one Monte-Carlo run.

    ``samples`` left as None is derived from the Hoeffding bound once the
    estimator knows the width of the sampled quantity.
    """

    epsilon: Fraction = Fraction(1, 20)
    delta: Fraction = Fraction(1, 100)
    seed: int = 0
    samples: int | None = None
    width: Fraction | None = None
    rng: str = RNG_ALGORITHM

    def __post_init__(self) -> None:
        object.__setattr__(self, "epsilon", to_rational(self.epsilon))
        object.__setattr__(self, "delta", to_rational(self.delta))
        if self.epsilon <= 0:
            raise InvalidInput(f"epsilon must be positive, got {self.epsilon}")
        if not 0 < self.delta < 1:
            raise InvalidInput(f"delta must lie in (0, 1), got {self.delta}")
        if not 0 <= self.seed < 2**64:
            raise InvalidInput(f"seed must be a 64-bit unsigned value, got {self.seed}")
        if self.samples is not None and self.samples < 1:
            raise InvalidInput(f"sample count must be positive, got {self.samples}")

    def resolved(self, width: Fraction) -> SamplingPlan:
        samples = self.samples if self.samples is not None else hoeffding_samples(width, self.epsilon, self.delta)
        return replace(self, samples=samples, width=Fraction(width))

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("epsilon", "delta", "width"):
            if d[key] is not None:
                d[key] = format_rational(d[key])
        return d


class Estimate(NamedTuple):
    value: Fraction
    plan: SamplingPlan


def _batches(plan: SamplingPlan) -> list[tuple[np.random.Generator, int]]:
    count = math.ceil(plan.samples / BATCH_SIZE)
    streams = np.random.SeedSequence(plan.seed).spawn(count)
    sizes = [BATCH_SIZE] * (count - 1) + [plan.samples - BATCH_SIZE * (count - 1)]
    return [(np.random.Generator(np.random.PCG64(s)), size) for s, size in zip(streams, sizes)]


def _tally(plan: SamplingPlan, draw, threads: int) -> Counter:
    """Run ``draw(rng, size) -> 2-d int array`` over every batch and count identical rows."""

    def one(batch):
        rng, size = batch
        rows, counts = np.unique(draw(rng, size), axis=0, return_counts=True)
        return Counter({tuple(int(v) for v in r): int(c) for r, c in zip(rows, counts)})

    batches = _batches(plan)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(one, batches))
    else:
        parts = [one(b) for b in batches]
    total: Counter = Counter()
    for part in parts:
        total.update(part)
    return total


def _uniform_below(rng: np.random.Generator, bound: int, size: int) -> np.ndarray:
    """``size`` independent integers uniform on [0, bound)."""
    if bound <= 2**62:
        return rng.integers(0, bound, size=size, dtype=np.int64)
    # assemble wide integers from 30-bit limbs and reject the overshoot
    limbs = -(-bound.bit_length() // 30)
    out = np.empty(size, dtype=object)
    filled = 0
    while filled < size:
        parts = rng.integers(0, 2**30, size=(size - filled, limbs), dtype=np.int64)
        for row in parts:
            value = 0
            for limb in row:
                value = (value << 30) | int(limb)
            if value < bound:
                out[filled] = value
                filled += 1
    return out


def _column_sampler(dist: ProductDistribution):
    """Draw support indices with exact rational probabilities."""
    tables = []
    for col in dist.columns:
        scale = math.lcm(*(p.denominator for _, p in col.support))
        cumulative = np.cumsum([int(p * scale) for _, p in col.support]).astype(object)
        tables.append((scale, cumulative))

    def draw(rng: np.random.Generator, size: int) -> np.ndarray:
        out = np.empty((size, len(tables)), dtype=np.int64)
        for j, (scale, cumulative) in enumerate(tables):
            if len(cumulative) == 1:
                out[:, j] = 0
                continue
            ticks = _uniform_below(rng, scale, size)
            out[:, j] = np.searchsorted(cumulative, ticks, side="right")
        return out

    return draw


def _random_keys(rng: np.random.Generator, size: int, m: int) -> np.ndarray:
    """One uniform random permutation of 0..m-1 per row, used as arrival order keys."""
    return rng.permuted(np.tile(np.arange(m), (size, 1)), axis=1)


def _mean(tally: Counter, value, samples: int) -> Fraction:
    return sum((count * value(key) for key, count in tally.items()), Fraction(0)) / samples


def _effect_of(M: Matrix, spec: RankingSpec, ctx: EffectContext):
    def effect(u) -> Fraction:
        return ctx(rank_matrix(apply_weights(M, u), spec))

    return effect


def _width(effect: EffectSpec, n: int) -> Fraction:
    lo, hi = effect_range(effect, n)
    return hi - lo


def mc_expectation(inst: ExpInstance, plan: SamplingPlan, threads: int = 1) -> Estimate:
    """Mean effect over i.i.d. weight vectors drawn from the instance's distribution."""
    plan = plan.resolved(_width(inst.effect, inst.n))
    supports = [col.values for col in inst.dist.columns]
    effect = _effect_of(inst.M, inst.spec, inst.context())
    tally = _tally(plan, _column_sampler(inst.dist), threads)
    value = _mean(tally, lambda key: effect(tuple(s[i] for s, i in zip(supports, key))), plan.samples)
    return Estimate(value, plan)


def mc_shap(inst: ShapInstance, plan: SamplingPlan, threads: int = 1) -> Estimate:
    """Permutation-sampling estimate of the SHAP score of ``inst.target``.

    Each sample draws a player order and a weight vector; the weights of the
    players arriving before the target are pinned to ``w``, and the sample is
    the change of ``-effect`` when the target's weight is pinned as well.
    Marginal contributions span twice the effect range, which sets the width.
    """
    if inst.target is None:
        raise InvalidInput("SHAP estimate needs a target column")
    M, m, j = inst.M, inst.M.m, inst.target - 1
    plan = plan.resolved(2 * _width(inst.effect, M.n))
    supports = [col.values for col in inst.dist.columns]
    pinned = np.array([s.index(v) for s, v in zip(supports, inst.w)], dtype=np.int64)
    sample_u = _column_sampler(inst.dist)

    def draw(rng, size):
        u = sample_u(rng, size)
        keys = _random_keys(rng, size, m)
        before = keys < keys[:, [j]]
        without = np.where(before, pinned, u)
        with_j = without.copy()
        with_j[:, j] = pinned[j]
        return np.hstack([with_j, without])

    base = rank_matrix(apply_weights(M, inst.w), inst.spec)
    effect = _effect_of(M, inst.spec, EffectContext(base, inst.effect))
    memo: dict[tuple, Fraction] = {}

    def f(key) -> Fraction:
        if key not in memo:
            memo[key] = -effect(tuple(s[i] for s, i in zip(supports, key)))
        return memo[key]

    tally = _tally(plan, draw, threads)
    value = _mean(tally, lambda key: f(key[:m]) - f(key[m:]), plan.samples)
    return Estimate(value, plan)


def mc_shapley(M: Matrix, spec: RankingSpec, effect: EffectSpec, j: int, plan: SamplingPlan, threads: int = 1) -> Estimate:
    """Permutation-sampling estimate of the Shapley value of column ``j``.

    Coalition values are ``-effect`` of the ranking by the coalition's columns
    alone, against the ranking by all columns.
    """
    if not 1 <= j <= M.m:
        raise InvalidInput(f"column index {j} outside 1..{M.m}")
    effect.validate(M.n)
    m = M.m
    plan = plan.resolved(2 * _width(effect, M.n))
    ctx = EffectContext(rank_matrix(M, spec), effect)

    def draw(rng, size):
        keys = _random_keys(rng, size, m)
        # prefix membership as one row of 0/1 flags per sample
        return (keys < keys[:, [j - 1]]).astype(np.int64)

    memo: dict[tuple, Fraction] = {}

    def nu(mask: tuple) -> Fraction:
        if mask not in memo:
            cols = [c + 1 for c, on in enumerate(mask) if on]
            memo[mask] = -ctx(rank_matrix(restrict_columns(M, cols), spec))
        return memo[mask]

    def marginal(mask: tuple) -> Fraction:
        with_j = list(mask)
        with_j[j - 1] = 1
        return nu(tuple(with_j)) - nu(mask)

    tally = _tally(plan, draw, threads)
    return Estimate(_mean(tally, marginal, plan.samples), plan)

