"""Friedman test for randomized complete block designs, with the per-group S-plot."""

__version__ = "0.1.0"

from .errors import (
    ConvergenceError,
    DataError,
    DegenerateError,
    DomainError,
    FriedmanSplotError,
    IncompleteDesignError,
)
from .friedman import FriedmanResult, MomentSet, friedman_moments, friedman_statistic
from .posthoc import AdjustMethod, PairwiseComparison, adjust_pvalues, conover, nemenyi
from .ranking import BlockDesign, RankMatrix, TieMethod, rank_sums, rank_within_blocks
from .splot import (
    GammaFit,
    SComponents,
    SPlotReport,
    decision_limit,
    gamma_fit,
    per_test_alpha,
    s_components,
    s_moments,
    splot_analysis,
)
from .tables import emit_table, load_example, parse_table

__all__ = [
    "AdjustMethod",
    "BlockDesign",
    "ConvergenceError",
    "DataError",
    "DegenerateError",
    "DomainError",
    "FriedmanResult",
    "FriedmanSplotError",
    "GammaFit",
    "IncompleteDesignError",
    "MomentSet",
    "PairwiseComparison",
    "RankMatrix",
    "SComponents",
    "SPlotReport",
    "TieMethod",
    "adjust_pvalues",
    "conover",
    "decision_limit",
    "emit_table",
    "friedman_moments",
    "friedman_statistic",
    "gamma_fit",
    "load_example",
    "nemenyi",
    "parse_table",
    "per_test_alpha",
    "rank_sums",
    "rank_within_blocks",
    "s_components",
    "s_moments",
    "splot_analysis",
]
