"""Bundled reference instances with hand-verified exact answers.

``worked-example``: four rows ranked by descending Sum of two columns whose
weights are uniform on {1, 2}. The four weight vectors produce the rankings
(1,2,3,4), (4,1,2,3), (3,2,1,4), (1,2,3,4).

``max-pair``: two rows under ascending Max with weights uniform on {0, 1}^3.

``cnf-top1``: the top-1 encoding of (x1 or x2 or x4) and (x1 or x3) and
(x2 or x3 or x4), which has 10 models among 16 assignments.
"""

from __future__ import annotations

from fractions import Fraction as F

from .errors import InvalidInput
from .instances import Instance, parse_instance

BUILTINS: dict[str, dict] = {
    "worked-example": {
        "matrix": [["20", "26"], ["30", "13"], ["40", "0"], ["0", "39"]],
        "ranking": {"score": "sum", "direction": "dsc"},
        "effect": {"kind": "kendall_tau"},
        "weights": ["1", "1"],
        "distributions": [[["1", "1/2"], ["2", "1/2"]], [["1", "1/2"], ["2", "1/2"]]],
    },
    "max-pair": {
        "matrix": [["3", "5", "2"], ["4", "1", "6"]],
        "ranking": {"score": "max", "direction": "asc"},
        "effect": {"kind": "kendall_tau"},
        "weights": ["1", "1", "1"],
        "distributions": [[["0", "1/2"], ["1", "1/2"]]] * 3,
    },
    "cnf-top1": {
        "matrix": [["1", "1", "0", "1"], ["1", "0", "1", "0"], ["0", "1", "1", "1"], ["0", "0", "0", "0"]],
        "ranking": {"score": "max", "direction": "asc"},
        "effect": {"kind": "topk_membership", "row": 4, "k": 1},
        "weights": ["1", "1", "1", "1"],
        "distributions": [[["0", "1/2"], ["1", "1/2"]]] * 4,
        "base": [1, 2, 3, 4],
    },
}

# worked-example: effect -> (expectation, SHAP per weight at w=(1,1), Shapley per column)
WORKED_EXAMPLE_VALUES: dict[tuple, tuple] = {
    ("kendall_tau", None, None): (F(3, 2), (F(3, 4), F(3, 4)), (F(0), F(0))),
    ("position", 4, None): (F(-3, 4), (F(3, 8), F(-9, 8)), (F(-3, 2), F(3, 2))),
    ("max_displacement", None, None): (F(5, 4), (F(3, 8), F(7, 8)), (F(1, 2), F(-1, 2))),
    ("hamming", None, None): (F(3, 2), (F(1, 4), F(5, 4)), (F(1), F(-1))),
    ("topk_membership", 4, 1): (F(1, 4), (F(-1, 8), F(3, 8)), (F(1, 2), F(-1, 2))),
    ("topk_difference", None, 2): (F(1), (F(1, 2), F(1, 2)), (F(0), F(0))),
    ("topk_anychange", None, 1): (F(1, 2), (F(1, 4), F(1, 4)), (F(0), F(0))),
}

# ranked row sequence for each weight vector of the worked example
WORKED_EXAMPLE_RANKINGS: dict[tuple[int, int], tuple[int, ...]] = {
    (1, 1): (1, 2, 3, 4),
    (1, 2): (4, 1, 2, 3),
    (2, 1): (3, 2, 1, 4),
    (2, 2): (1, 2, 3, 4),
}

# max-pair: P(row 1 before row 2) with ties to row 2, ascending and descending (ties to row 1)
MAX_PAIR_PREC_ASC = F(5, 8)
MAX_PAIR_PREC_DSC = F(3, 8)
MAX_PAIR_TERM_MASSES = (F(1, 8), F(4, 8))

CNF_TOP1_MODELS = 10


def builtin(name: str) -> Instance:
    if name not in BUILTINS:
        raise InvalidInput(f"unknown builtin {name!r}; choose from {', '.join(sorted(BUILTINS))}")
    return parse_instance(BUILTINS[name])
