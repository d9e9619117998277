"""Seeded random instance builders shared by the tests."""

from __future__ import annotations

import random
from fractions import Fraction

from rankexplain.core import ColumnDistribution, Matrix, Permutation, ProductDistribution
from rankexplain.ranking import ROW_KINDS, TOPK_KINDS, EffectKind, EffectSpec

WORKED_ROWS = [[20, 26], [30, 13], [40, 0], [0, 39]]


def worked_matrix() -> Matrix:
    return Matrix.of(WORKED_ROWS)


def worked_dist() -> ProductDistribution:
    return ProductDistribution.uniform([1, 2], 2)


def random_matrix(rng: random.Random, n: int, m: int, lo: int = -5, hi: int = 5) -> Matrix:
    return Matrix.of([[rng.randint(lo, hi) for _ in range(m)] for _ in range(n)])


def random_column(rng: random.Random, max_support: int = 3, lo: int = -3, hi: int = 3) -> ColumnDistribution:
    values = rng.sample(range(lo, hi + 1), rng.randint(1, max_support))
    masses = [rng.randint(1, 4) for _ in values]
    total = sum(masses)
    return ColumnDistribution(tuple((Fraction(v), Fraction(p, total)) for v, p in zip(values, masses)))


def random_dist(rng: random.Random, m: int, max_support: int = 3, lo: int = -3, hi: int = 3) -> ProductDistribution:
    return ProductDistribution(tuple(random_column(rng, max_support, lo, hi) for _ in range(m)))


def random_effect(rng: random.Random, n: int, kind: EffectKind | None = None) -> EffectSpec:
    kind = kind or rng.choice(list(EffectKind))
    row = rng.randint(1, n) if kind in ROW_KINDS else None
    k = rng.randint(1, n) if kind in TOPK_KINDS else None
    return EffectSpec(kind, row, k)


def random_permutation(rng: random.Random, n: int) -> Permutation:
    order = list(range(1, n + 1))
    rng.shuffle(order)
    return Permutation(tuple(order))
