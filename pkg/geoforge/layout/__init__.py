"""
Constraint layout: compile facts to residuals and solve for point coordinates
"""

from .compile import ConstraintSystem, compile_constraints, map_fact, order_points
from .optimize import (
    NUMERICAL_FAILURE,
    THRESHOLD_FAIL,
    LayoutConfig,
    LayoutSolution,
    ThresholdReport,
    check_thresholds,
    fit_to_canvas,
    levenberg_marquardt,
    optimize,
)
from .residuals import INCIDENCE, KIND_CLASS, METRIC, Residual, Variables, evaluate

__all__ = [
    "ConstraintSystem",
    "INCIDENCE",
    "KIND_CLASS",
    "LayoutConfig",
    "LayoutSolution",
    "METRIC",
    "NUMERICAL_FAILURE",
    "Residual",
    "THRESHOLD_FAIL",
    "ThresholdReport",
    "Variables",
    "check_thresholds",
    "compile_constraints",
    "evaluate",
    "fit_to_canvas",
    "levenberg_marquardt",
    "map_fact",
    "optimize",
    "order_points",
]
