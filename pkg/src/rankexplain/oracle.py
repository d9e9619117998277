"""Brute-force references.

Everything here re-derives rankings and effects from their definitions and
enumerates full probability spaces or coalition lattices. Only the core data
types are shared with the engine, so agreement between the two is evidence
rather than tautology.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .core import Matrix, ProductDistribution
from .errors import InvalidInput, ResourceCapExceeded

ENUMERATION_CAP = 2**16
MAX_PLAYERS = 8
MAX_VARIABLES = 20


def _score(row, score: str) -> object:
    if score == "sum":
        return sum(row, Fraction(0))
    if score == "max":
        return max(row)
    if score == "min":
        return min(row)
    return tuple(row)


def brute_rank(rows, score: str, direction: str) -> list[int]:
    """Rank positions (1-based) of each row, by pairwise comparison counting.

    A row's rank is one plus the number of rows that beat it; row ``a``
    beats ``b`` when its score is strictly better, or equal with ``a < b``.
    """
    n = len(rows)
    if not rows or len(rows[0]) == 0:
        return list(range(1, n + 1))
    scores = [_score(r, score) for r in rows]
    ranks = []
    for b in range(n):
        beaten_by = 0
        for a in range(n):
            if a == b:
                continue
            if direction == "asc":
                better = scores[a] < scores[b]
            else:
                better = scores[a] > scores[b]
            if better or (scores[a] == scores[b] and a < b):
                beaten_by += 1
        ranks.append(beaten_by + 1)
    return ranks


def brute_effect(kind: str, base: list[int], ranks: list[int], row: int | None = None, k: int | None = None) -> Fraction:
    n = len(base)
    if kind == "kendall_tau":
        v = sum(1 for i in range(n) for j in range(n) if base[i] < base[j] and ranks[i] > ranks[j])
    elif kind == "max_displacement":
        v = max(abs(ranks[i] - base[i]) for i in range(n))
    elif kind == "hamming":
        v = sum(1 for i in range(n) if ranks[i] != base[i])
    elif kind == "position":
        v = ranks[row - 1] - base[row - 1]
    elif kind == "topk_membership":
        v = (1 if ranks[row - 1] <= k else 0) - (1 if base[row - 1] <= k else 0)
    else:
        top = {i for i in range(n) if ranks[i] <= k}
        top0 = {i for i in range(n) if base[i] <= k}
        if kind == "topk_difference":
            v = len(top | top0) - len(top & top0)
        elif kind == "topk_anychange":
            v = 1 if top != top0 else 0
        else:
            raise InvalidInput(f"unknown effect {kind!r}")
    return Fraction(v)


def _weighted(M: Matrix, u) -> list[list[Fraction]]:
    return [[v * w for v, w in zip(r, u)] for r in M.rows]


def _spec_parts(spec) -> tuple[str, str]:
    return spec.score.value, spec.direction.value


def _effect_parts(effect) -> tuple[str, int | None, int | None]:
    return effect.kind.value, effect.row, effect.k


def brute_expectation(inst, cap: int = ENUMERATION_CAP) -> Fraction:
    """Expected effect by summing over every weight vector of the product space."""
    M, dist = inst.M, inst.dist
    if dist.space_size > cap:
        raise ResourceCapExceeded("oracle-enumeration", dist.space_size, cap)
    score, direction = _spec_parts(inst.spec)
    kind, row, k = _effect_parts(inst.effect)
    base = list(inst.base.ranks)
    total = Fraction(0)
    for u, p in dist.outcomes():
        ranks = brute_rank(_weighted(M, u), score, direction)
        total += p * brute_effect(kind, base, ranks, row, k)
    return total


def _shapley_from_game(players: int, target: int, nu) -> Fraction:
    others = [p for p in range(players) if p != target]
    total = Fraction(0)
    for size in range(players):
        weight = Fraction(math.factorial(size) * math.factorial(players - size - 1), math.factorial(players))
        for coalition in itertools.combinations(others, size):
            c = frozenset(coalition)
            total += weight * (nu(c | {target}) - nu(c))
    return total


def brute_shap(inst, cap: int = ENUMERATION_CAP) -> Fraction:
    """SHAP score of weight ``inst.target`` straight from the Shapley formula.

    Coalition values are conditional expectations of ``-effect`` with the
    coalition's weights pinned to ``inst.w``.
    """
    M, dist, w = inst.M, inst.dist, inst.w
    m = M.m
    if m > MAX_PLAYERS:
        raise ResourceCapExceeded("oracle-players", m, MAX_PLAYERS)
    if dist.space_size > cap:
        raise ResourceCapExceeded("oracle-enumeration", dist.space_size, cap)
    score, direction = _spec_parts(inst.spec)
    kind, row, k = _effect_parts(inst.effect)
    base = brute_rank(_weighted(M, w), score, direction)
    outcomes = list(dist.outcomes())
    memo: dict[frozenset, Fraction] = {}

    def nu(c: frozenset) -> Fraction:
        if c not in memo:
            num = Fraction(0)
            den = Fraction(0)
            for u, p in outcomes:
                if all(u[j] == w[j] for j in c):
                    ranks = brute_rank(_weighted(M, u), score, direction)
                    num += p * -brute_effect(kind, base, ranks, row, k)
                    den += p
            memo[c] = num / den
        return memo[c]

    return _shapley_from_game(m, inst.target - 1, nu)


def brute_shapley(M: Matrix, spec, effect, j: int) -> Fraction:
    """Shapley value of column ``j`` for the game ``C -> -effect(rank(M restricted to C))``."""
    m = M.m
    if m > MAX_PLAYERS:
        raise ResourceCapExceeded("oracle-players", m, MAX_PLAYERS)
    if not 1 <= j <= m:
        raise InvalidInput(f"column {j} outside 1..{m}")
    score, direction = _spec_parts(spec)
    kind, row, k = _effect_parts(effect)
    base = brute_rank([list(r) for r in M.rows], score, direction)

    def nu(c: frozenset) -> Fraction:
        cols = sorted(c)
        rows = [[r[x] for x in cols] for r in M.rows]
        ranks = brute_rank(rows, score, direction)
        return -brute_effect(kind, base, ranks, row, k)

    return _shapley_from_game(m, j - 1, nu)


def count_sat_positive_cnf(phi) -> int:
    """Number of assignments to ``phi``'s variables that satisfy every clause."""
    m = phi.n_vars
    if m > MAX_VARIABLES:
        raise ResourceCapExceeded("oracle-variables", m, MAX_VARIABLES)
    count = 0
    for bits in itertools.product((False, True), repeat=m):
        if all(any(bits[x - 1] for x in clause) for clause in phi.clauses):
            count += 1
    return count


def count_knapsack(b, d: int) -> int:
    """Number of subsets of the items ``b`` whose total weight is at most ``d``."""
    b = list(b)
    if len(b) > MAX_VARIABLES:
        raise ResourceCapExceeded("oracle-variables", len(b), MAX_VARIABLES)
    return sum(
        1
        for chosen in itertools.product((0, 1), repeat=len(b))
        if sum(x * y for x, y in zip(chosen, b)) <= d
    )
