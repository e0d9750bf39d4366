"""
Conditional Declaration Language: facts, parser, printer and validator
"""

from .catalog import CONSTRUCTIONS, QUANTITIES, RELATIONS
from .facts import ConstructionFact, FormalProblem, Goal, MetricFact, RelationFact, as_value
from .parser import parse_problem, parse_seed_json, parse_statement, scan_problem, scan_seed_json
from .printer import format_fact, format_value, human_value, print_problem, problem_to_json
from .validate import ValidationReport, Violation, head_key, validate

__all__ = [
    "CONSTRUCTIONS",
    "QUANTITIES",
    "RELATIONS",
    "ConstructionFact",
    "FormalProblem",
    "Goal",
    "MetricFact",
    "RelationFact",
    "as_value",
    "parse_problem",
    "parse_seed_json",
    "parse_statement",
    "scan_problem",
    "scan_seed_json",
    "format_fact",
    "format_value",
    "human_value",
    "print_problem",
    "problem_to_json",
    "ValidationReport",
    "Violation",
    "head_key",
    "validate",
]
