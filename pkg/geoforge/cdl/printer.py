"""
CDL printer, the inverse of the parser
"""

from decimal import Decimal
from fractions import Fraction

from .facts import ConstructionFact, FormalProblem, Goal, MetricFact, RelationFact, join_points
from .parser import IMAGE_PREFIX


def format_value(value) -> str:
    """Exact text for a value: rationals as 'n' or 'n/d', floats in shortest repr."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    text = repr(float(value))
    if "e" not in text and "." not in text:
        text += ".0"
    return text


def human_value(value, digits=6) -> str:
    """Short human-facing number: integers bare, otherwise `digits` significant
    digits in positional notation (never an exponent)."""
    if isinstance(value, Fraction) and value.denominator == 1:
        return str(value.numerator)
    number = float(value)
    if number == int(number) and abs(number) < 1e15:
        return str(int(number))
    text = format(Decimal(f"{number:.{digits}g}"), "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text


def format_construction(fact: ConstructionFact) -> str:
    return f"{fact.kind}({','.join(join_points(a) for a in fact.args)})"


def format_goal(goal: Goal) -> str:
    return f"Value({goal.quantity}({join_points(goal.args)}))"


def format_fact(fact) -> str:
    if isinstance(fact, MetricFact):
        return f"Equal({fact.quantity}({join_points(fact.args)}),{format_value(fact.value)})"
    if isinstance(fact, RelationFact):
        return f"{fact.predicate}({','.join(join_points(a) for a in fact.args)})"
    if isinstance(fact, ConstructionFact):
        return format_construction(fact)
    if isinstance(fact, Goal):
        return format_goal(fact)
    raise TypeError(f"not a CDL fact: {fact!r}")


def problem_lines(p: FormalProblem):
    lines = []
    if p.id:
        lines.append(f"# problem: {p.id}")
    lines.extend(format_construction(c) for c in p.constructions)
    lines.extend(format_fact(f) for f in p.text_facts)
    lines.extend(IMAGE_PREFIX + format_fact(f) for f in p.image_facts)
    if p.goal is not None:
        lines.append(format_goal(p.goal))
    return lines


def print_problem(p: FormalProblem) -> str:
    return "\n".join(problem_lines(p)) + "\n"


def problem_to_json(p: FormalProblem) -> dict:
    """Seed annotation object (construction_cdl, text_cdl, ...), accepted back by parse_seed_json."""
    return {
        "problem_id": p.id,
        "construction_cdl": [format_construction(c) for c in p.constructions],
        "text_cdl": [format_fact(f) for f in p.text_facts],
        "image_cdl": [format_fact(f) for f in p.image_facts],
        "goal_cdl": format_goal(p.goal) if p.goal is not None else None,
    }
