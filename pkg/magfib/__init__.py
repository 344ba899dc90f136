"""Magnitude homology of finite metric spaces and metric fibrations, in exact arithmetic."""

from .classify import DMembership, d_membership, fill_hv, t_word, unfill_hv, weight
from .exceptions import (
    ChainComplexError,
    ChainMapError,
    DeltaSetError,
    EnumerationLimitError,
    FibrationError,
    InputError,
    MagfibError,
    MetricError,
    MorseError,
    WordError,
)
from .fibration import MetricFibrationData, lift, trivial_product, verify_fibration
from .homology import HomologySummary, homology, is_quasi_iso
from .magchain import GradedChainComplex, Restriction, build_complex, enumerate_paths
from .metspace import FiniteMetricSpace, from_graph, from_matrix, is_between, validate_metric

__version__ = "1.0.1"

__all__ = [
    "ChainComplexError",
    "ChainMapError",
    "DMembership",
    "DeltaSetError",
    "EnumerationLimitError",
    "FibrationError",
    "FiniteMetricSpace",
    "GradedChainComplex",
    "HomologySummary",
    "InputError",
    "MagfibError",
    "MetricError",
    "MetricFibrationData",
    "MorseError",
    "Restriction",
    "WordError",
    "build_complex",
    "d_membership",
    "enumerate_paths",
    "fill_hv",
    "from_graph",
    "from_matrix",
    "homology",
    "is_between",
    "is_quasi_iso",
    "lift",
    "t_word",
    "trivial_product",
    "unfill_hv",
    "validate_metric",
    "verify_fibration",
    "weight",
]
