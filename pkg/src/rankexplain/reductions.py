"""Matrices that encode counting problems as ranking questions.

These generators build the instances on which precedence, top-k membership
and displacement expectations count knapsack solutions or models of
positive CNF formulas. They serve as structured fixtures whose counting
identities can be checked mechanically.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction

from .core import Matrix
from .errors import InvalidInput
from .ranking import LEX, MAX_ASC, SUM, RankingSpec, Score, rank_matrix


@dataclass(frozen=True)
class PositiveCNF:
    """A conjunction of clauses over variables 1..n_vars, each clause a set of positive literals."""

    n_vars: int
    clauses: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        if self.n_vars < 0:
            raise InvalidInput(f"negative variable count {self.n_vars}")
        clauses = tuple(frozenset(c) for c in self.clauses)
        for c in clauses:
            if not c:
                raise InvalidInput("clauses must be nonempty")
            if any(not isinstance(x, int) or not 1 <= x <= self.n_vars for x in c):
                raise InvalidInput(f"clause {sorted(c)} uses variables outside 1..{self.n_vars}")
        object.__setattr__(self, "clauses", clauses)

    @classmethod
    def of(cls, n_vars: int, clauses: Iterable[Iterable[int]]) -> PositiveCNF:
        return cls(n_vars, tuple(frozenset(c) for c in clauses))

    def satisfied_by(self, true_vars: Iterable[int]) -> bool:
        chosen = set(true_vars)
        return all(c & chosen for c in self.clauses)

    def incidence_rows(self) -> list[tuple[Fraction, ...]]:
        return [tuple(Fraction(int(x in c)) for x in range(1, self.n_vars + 1)) for c in self.clauses]


@dataclass(frozen=True)
class KnapsackInstance:
    """Item sizes ``b`` and capacity ``d``; solutions are item subsets of total size at most d."""

    b: tuple[int, ...]
    d: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "b", tuple(self.b))
        for v in (*self.b, self.d):
            if not isinstance(v, int) or v < 0:
                raise InvalidInput(f"knapsack values must be natural numbers, got {v!r}")


def gen_knapsack_matrix(inst: KnapsackInstance) -> Matrix:
    """Two rows ``(0, ..., 0, d+1)`` and ``(b_1, ..., b_l, 0)``.

    Under 0/1 weights selecting columns C, row 2 is ranked no later than
    row 1 by ascending Sum exactly when the last column is in C and the
    selected items fit into d.
    """
    l = len(inst.b)
    return Matrix.of([[0] * l + [inst.d + 1], list(inst.b) + [0]])


def gen_cnf_topk_matrix(phi: PositiveCNF, k: int) -> Matrix:
    """``k - 1`` zero rows, the clause incidence rows, and a final zero row.

    Under 0/1 weights selecting the true variables, the final row is in the
    top k (ascending Max, Sum or Lex) exactly when every clause is satisfied.
    """
    if k < 1:
        raise InvalidInput(f"k must be at least 1, got {k}")
    m = phi.n_vars
    zero = tuple(Fraction(0) for _ in range(m))
    rows = [zero] * (k - 1) + phi.incidence_rows() + [zero]
    return Matrix(tuple(rows), m)


_MD_SPECS = (MAX_ASC, SUM, LEX)


def _clause_order(rows: list[tuple[Fraction, ...]], spec: RankingSpec) -> list[tuple[Fraction, ...]]:
    if spec.score is Score.SUM:
        return sorted(rows, key=sum)
    if spec.score is Score.LEX:
        return sorted(rows)
    return list(rows)


def gen_md_matrix_pair(phi: PositiveCNF, spec: RankingSpec) -> tuple[Matrix, Matrix]:
    """Clause rows followed by ``l + 1`` (first matrix) or ``l + 2`` (second) zero rows.

    Clause rows are pre-sorted into the order they take in the full ranking.
    For every column set C, the displacement (or Hamming distance) between
    the ranking of the full matrix and of its restriction to C grows by
    exactly one from the first matrix to the second when C falsifies the
    formula, and does not change when C satisfies it.
    """
    if spec not in _MD_SPECS:
        raise InvalidInput(f"displacement construction is defined for max-asc, sum-asc and lex, not {spec}")
    m = phi.n_vars
    l = len(phi.clauses)
    clause_rows = _clause_order(phi.incidence_rows(), spec)
    zero = tuple(Fraction(0) for _ in range(m))
    pair = []
    for extra in (l + 1, l + 2):
        M = Matrix(tuple(clause_rows + [zero] * extra), m)
        expected = tuple(range(l + 1, l + extra + 1)) + tuple(range(1, l + 1))
        if m and rank_matrix(M, spec).order != expected:
            raise InvalidInput("clause rows cannot be arranged in ranking order")
        pair.append(M)
    return pair[0], pair[1]
