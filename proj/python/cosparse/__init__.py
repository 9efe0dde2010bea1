"""Cosparse (GAP/SGAP) and sparse (OMMP/SOMMP) compressive-sensing reconstruction."""

from ._cosparse import (
    BoxplotSummary,
    ConfigError,
    MetricError,
    ParseError,
    ReconstructionResult,
    ShapeError,
    SingularMatrixError,
    boxplot_stats,
    compression_ratio,
    daubechies_dictionary,
    first_order_diff,
    gap,
    gaussian_measurement,
    ommp,
    prd,
    second_order_diff,
    sgap,
    solve_spd,
    sommp,
    synth_cosparse,
)

__all__ = [
    "BoxplotSummary",
    "ConfigError",
    "MetricError",
    "ParseError",
    "ReconstructionResult",
    "ShapeError",
    "SingularMatrixError",
    "boxplot_stats",
    "compression_ratio",
    "daubechies_dictionary",
    "first_order_diff",
    "gap",
    "gaussian_measurement",
    "ommp",
    "prd",
    "second_order_diff",
    "sgap",
    "solve_spd",
    "sommp",
    "synth_cosparse",
]
