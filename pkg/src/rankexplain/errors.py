"""Exception types shared across the package."""

from __future__ import annotations


class InvalidInput(ValueError):
    """Malformed or inconsistent input (dimension mismatch, bad index, bad distribution)."""


class ExactIntractable(Exception):
    """Raised when exact computation falls into a #P-hard cell of the complexity map.

    ``cell`` names the (ranking, effect) combination, ``hardness`` the
    reduction that makes it hard.
    """

    def __init__(self, cell: str, hardness: str, suggestion: str = "use the Monte-Carlo estimators (mode 'approx')"):
        self.cell = cell
        self.hardness = hardness
        self.suggestion = suggestion
        super().__init__(f"exact computation is FP^#P-hard for {cell}: {hardness}; {suggestion}")


class ResourceCapExceeded(Exception):
    """A configured resource guard (enumeration size, DP states, k) would be exceeded."""

    def __init__(self, cap: str, requested: int, limit: int):
        self.cap = cap
        self.requested = requested
        self.limit = limit
        super().__init__(f"cap '{cap}' exceeded: need {requested}, limit is {limit}")
