"""Validation statistics module"""

from .evaluator import (
    STATISTICS, Evaluator, ValidationStats, combine_draw_stats, mixture_moments, posterior_predictive,
    posterior_stats, predictive_statistics, stats_at_theta,
)

__all__ = [
    "Evaluator", "ValidationStats", "STATISTICS", "predictive_statistics",
    "stats_at_theta", "posterior_stats", "combine_draw_stats", "mixture_moments",
    "posterior_predictive",
]
