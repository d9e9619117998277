"""Exact and sampled explanations of how random column weights move a ranking."""

from .attribution import (
    Attribution,
    ShapInstance,
    shap_all,
    shap_attribution,
    shap_score,
    shapley_all,
    shapley_attribution,
    shapley_column,
)
from .core import (
    ColumnDistribution,
    Matrix,
    Permutation,
    ProductDistribution,
    apply_weights,
    format_rational,
    restrict_columns,
    to_rational,
)
from .errors import ExactIntractable, InvalidInput, ResourceCapExceeded
from .expectation import Caps, ExpInstance, Method, expect_effect
from .pairwise import Encoding, Tie, prec_lex, prec_max, prec_probability, prec_sum_dp
from .ranking import (
    LEX,
    MAX_ASC,
    MAX_DSC,
    MIN_ASC,
    MIN_DSC,
    SUM,
    SUM_DSC,
    EffectContext,
    EffectKind,
    EffectSpec,
    RankingSpec,
    effect_range,
    effect_value,
    normalize,
    rank_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "LEX",
    "MAX_ASC",
    "MAX_DSC",
    "MIN_ASC",
    "MIN_DSC",
    "SUM",
    "SUM_DSC",
    "Attribution",
    "Caps",
    "ColumnDistribution",
    "EffectContext",
    "EffectKind",
    "EffectSpec",
    "Encoding",
    "ExactIntractable",
    "ExpInstance",
    "InvalidInput",
    "Matrix",
    "Method",
    "Permutation",
    "ProductDistribution",
    "RankingSpec",
    "ResourceCapExceeded",
    "ShapInstance",
    "Tie",
    "apply_weights",
    "effect_range",
    "effect_value",
    "expect_effect",
    "format_rational",
    "normalize",
    "prec_lex",
    "prec_max",
    "prec_probability",
    "prec_sum_dp",
    "rank_matrix",
    "restrict_columns",
    "shap_all",
    "shap_attribution",
    "shap_score",
    "shapley_all",
    "shapley_attribution",
    "shapley_column",
    "to_rational",
]
