"""
Question and solution text from formal problems and derivation traces
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from ..cdl.facts import POINT_RE, FormalProblem, Goal, MetricFact, RelationFact, join_points
from ..cdl.printer import format_value, human_value
from ..engine import equations as E
from ..engine.deduce import SOLVE_EQUATION, SOLVE_LINEAR_SYSTEM
from ..engine.store import DerivationStep
from ..engine.symbols import Determination, QuantitySymbol
from .templates import TemplateBank, default_bank

ANSWER_SENTENCE = "The answer is {}."
OPENING = "As shown in the figure"

# theorems whose binding key starts with the one point worth naming
_SUBJECT_FIRST = {"circle_property_radius", "circle_property_diameter", "vertical_angles", "linear_pair"}


def shape_name(points) -> str:
    name = join_points(points)
    if len(points) == 3:
        return f"triangle {name}"
    if len(points) == 4:
        return f"quadrilateral {name}"
    return f"polygon {name}"


def quantity_slots(kind: str, args) -> dict:
    slots = {"p": join_points(args)}
    if kind == "LengthOfArc":
        slots.update(center=args[0], arc=join_points(args[1:]))
    if kind in ("PerimeterOf", "AreaOf"):
        slots["shape"] = shape_name(args)
    return slots


def quantity_phrase(kind: str, args) -> str:
    """Noun phrase naming a quantity, as used inside equations."""
    name = join_points(args)
    if kind == "LengthOfLine":
        return name
    if kind == "MeasureOfAngle":
        return f"angle {name}"
    if kind == "LengthOfArc":
        return f"arc {join_points(args[1:])}"
    if kind == "RadiusOfCircle":
        return f"the radius of circle {name}"
    if kind == "DiameterOfCircle":
        return f"the diameter of circle {name}"
    if kind == "PerimeterOf":
        return f"the perimeter of {shape_name(args)}"
    if kind == "AreaOf":
        return f"the area of {shape_name(args)}"
    return f"{kind}({name})"


def _phrase(symbol: QuantitySymbol) -> str:
    return quantity_phrase(symbol.kind, symbol.args)


def _number(value) -> str:
    if isinstance(value, Fraction):
        return format_value(value)
    return human_value(value)


def _term(symbol, coef, power="") -> str:
    coef = abs(coef)
    head = "" if coef == 1 else f"{_number(coef)} * "
    return f"{head}{_phrase(symbol)}{power}"


def describe_equation(eq: E.Equation) -> str:
    """Equation in words, positive terms on the left, the rest on the right."""
    if eq.shape == E.PRODUCT:
        def powered(terms):
            return [_phrase(s) + ("" if abs(e) == 1 else f"^{abs(e)}") for s, e in terms]

        left = powered([t for t in eq.terms if t[1] > 0])
        right = powered([t for t in eq.terms if t[1] < 0])
        const = eq.constant
        if const != 1 or not right:
            right = [_number(const)] + right
        return f"{' * '.join(left)} = {' * '.join(right)}"
    power = "^2" if eq.shape == E.SQUARES else ""
    left = [_term(s, c, power) for s, c in eq.terms if c > 0]
    right = [_term(s, c, power) for s, c in eq.terms if c < 0]
    if eq.constant != 0:
        right.append(_number(-eq.constant))
    if not left:
        left, right = right, left
    return f"{' + '.join(left) or '0'} = {' + '.join(right) or '0'}"


def relation_clause(rel: RelationFact, bank: TemplateBank, rng=None) -> str:
    args = [join_points(a) for a in rel.args]
    slots = {"a": args[0], "b": args[1] if len(args) > 1 else ""}
    first = rel.args[0]
    slots["apex"] = first[0]
    slots["vertex"] = first[1] if len(first) > 1 else first[0]
    slots["touch"] = first[-1]
    slots["base"] = join_points(rel.args[1][1:]) if len(rel.args) > 1 else ""
    return bank.choose("relations", rel.predicate, rng).format(**slots)


def metric_clause(fact: MetricFact, bank: TemplateBank, rng=None) -> str:
    slots = quantity_slots(fact.quantity, fact.args)
    slots["v"] = human_value(fact.value)
    return bank.choose("metrics", fact.quantity, rng).format(**slots)


def conclusion_text(item, bank: Optional[TemplateBank] = None) -> str:
    if isinstance(item, Determination):
        return f"{_phrase(item.symbol)} = {human_value(item.value)}"
    if isinstance(item, E.Equation):
        return describe_equation(item)
    if isinstance(item, RelationFact):
        return relation_clause(item, bank or default_bank())
    if isinstance(item, MetricFact):
        return metric_clause(item, bank or default_bank())
    return str(item)


def fact_clause(fact, bank: TemplateBank, rng=None) -> str:
    if isinstance(fact, RelationFact):
        return relation_clause(fact, bank, rng)
    return metric_clause(fact, bank, rng)


def goal_sentence(goal: Goal, bank: TemplateBank, rng=None) -> str:
    return bank.choose("goals", goal.quantity, rng).format(**quantity_slots(goal.quantity, goal.args))


def _capitalize(text: str) -> str:
    return text[:1].upper() + text[1:]


def verbalize_problem(p: FormalProblem, bank: Optional[TemplateBank] = None, rng=None) -> str:
    """One clause per text-channel fact, then the goal; image facts stay in the picture."""
    bank = bank or default_bank()
    if p.goal is None:
        raise ValueError("problem has no goal to ask for")
    clauses = [fact_clause(f, bank, rng) for f in p.text_facts]
    ask = goal_sentence(p.goal, bank, rng)
    if not clauses:
        return f"{OPENING}, {ask[:1].lower()}{ask[1:]}"
    sentences = [f"{OPENING}, {clauses[0]}."] + [f"{_capitalize(c)}." for c in clauses[1:]]
    return " ".join(sentences + [ask])


def _labels(node):
    if isinstance(node, str):
        if POINT_RE.fullmatch(node):
            yield node
        return
    if isinstance(node, tuple):
        for part in node:
            yield from _labels(part)


def step_subject(step: DerivationStep) -> str:
    """Point run naming the figure a step is about, read off its binding key."""
    key = step.binding
    if not key:
        return ""
    if step.theorem in _SUBJECT_FIRST:
        key = key[0]
    elif isinstance(key[0], str) and not POINT_RE.fullmatch(key[0]):
        key = key[1]
    elif isinstance(key[0], tuple):
        key = key[0]
    return "".join(dict.fromkeys(_labels(key)))


def _step_equations(step: DerivationStep) -> str:
    if step.theorem == SOLVE_EQUATION:
        return describe_equation(step.binding[0])
    if step.theorem == SOLVE_LINEAR_SYSTEM:
        return " and ".join(describe_equation(eq) for eq in step.binding[0])
    return ""


def step_sentence(step: DerivationStep, bank: TemplateBank, rng=None) -> str:
    conclusion = " and ".join(conclusion_text(c, bank) for c in step.conclusions)
    template = bank.choose("theorems", step.theorem, rng)
    return template.format(subject=step_subject(step), conclusion=conclusion, equation=_step_equations(step))


def answer_text(value) -> str:
    return human_value(value)


def verbalize_solution(
    trace: Sequence[DerivationStep], answer, bank: Optional[TemplateBank] = None, rng=None
) -> str:
    """One line per step in trace order, then the answer line."""
    if not trace:
        raise ValueError("cannot verbalize an empty trace")
    bank = bank or default_bank()
    lines = [step_sentence(step, bank, rng) for step in trace]
    lines.append(ANSWER_SENTENCE.format(answer_text(answer)))
    return "\n".join(lines)
