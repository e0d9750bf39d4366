"""
Forward-chaining deduction over the theorem library
"""

from .deduce import (
    ALGEBRA,
    DeductionBudget,
    DeductionResult,
    Solved,
    Unsolved,
    deduce,
    extract_metrics,
    goal_trace,
    match_theorem,
    propagate,
    replay,
    statement_metrics,
    trace_to_json,
)
from .equations import Equation
from .figure import Figure
from .store import Binding, DerivationStep, FactStore
from .symbols import Determination, MetricSet, QuantitySymbol
from .theorems import THEOREMS, Theorem

__all__ = [
    "ALGEBRA",
    "Binding",
    "DeductionBudget",
    "DeductionResult",
    "DerivationStep",
    "Determination",
    "Equation",
    "FactStore",
    "Figure",
    "MetricSet",
    "QuantitySymbol",
    "Solved",
    "THEOREMS",
    "Theorem",
    "Unsolved",
    "deduce",
    "extract_metrics",
    "goal_trace",
    "match_theorem",
    "propagate",
    "replay",
    "statement_metrics",
    "trace_to_json",
]
