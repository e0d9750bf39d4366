"""
Grammar-level validation of formal problems
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from . import catalog
from .facts import FormalProblem, MetricFact, RelationFact, is_finite


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str
    subject: Optional[object] = None

    def __str__(self):
        return f"{self.kind}: {self.detail}"


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> Tuple[str, ...]:
        return tuple(v.kind for v in self.violations)

    def by_kind(self, kind) -> List[Violation]:
        return [v for v in self.violations if v.kind == kind]

    def add(self, kind, detail, subject=None):
        self.violations.append(Violation(kind, detail, subject))

    def summary(self) -> str:
        return "; ".join(str(v) for v in self.violations) or "ok"


def _rotations(points):
    n = len(points)
    for seq in (tuple(points), tuple(reversed(points))):
        for i in range(n):
            yield seq[i:] + seq[:i]


def head_key(quantity, args):
    """Name-level canonical head: segment ends sorted, angles read either way,
    polygons up to rotation and reflection."""
    args = tuple(args)
    if quantity == "LengthOfLine":
        return quantity, tuple(sorted(args))
    if quantity == "MeasureOfAngle":
        return quantity, min(args, tuple(reversed(args)))
    if quantity in ("PerimeterOf", "AreaOf"):
        return quantity, min(_rotations(args))
    return quantity, args


def _check_value(report, fact: MetricFact):
    value = fact.value
    label = f"{fact.quantity}({''.join(fact.args)})"
    if not is_finite(value):
        report.add("OutOfRange", f"{label} is not finite", fact)
        return
    number = float(value)
    if math.isnan(number):
        report.add("OutOfRange", f"{label} is not a number", fact)
    elif fact.quantity == "MeasureOfAngle":
        if not 0 < number < 360:
            report.add("OutOfRange", f"{label} = {number:g} outside (0, 360)", fact)
    elif number <= 0:
        report.add("OutOfRange", f"{label} = {number:g} must be positive", fact)


def _check_constructions(report, p: FormalProblem):
    for fact in p.constructions:
        if fact.kind not in catalog.CONSTRUCTIONS:
            report.add("UnknownPredicate", fact.kind, fact)
        elif fact.kind == "Shape":
            edges = fact.args
            closed = len(edges) >= 3 and all(len(e) == 2 for e in edges) and all(
                a[1] == b[0] for a, b in zip(edges, edges[1:] + edges[:1])
            )
            starts = [e[0] for e in edges]
            if not closed or len(set(starts)) != len(starts):
                report.add("MalformedConstruction", "Shape edge chain is not a closed simple chain", fact)
        elif fact.kind == "Collinear":
            pts = fact.args[0] if fact.args else ()
            if len(fact.args) != 1 or len(pts) < 3 or len(set(pts)) != len(pts):
                report.add("MalformedConstruction", "Collinear needs 3+ distinct points", fact)
        elif fact.kind == "Cocircular":
            if len(fact.args) != 2 or len(fact.args[0]) != 1 or not fact.args[1]:
                report.add("MalformedConstruction", "Cocircular needs a center and 1+ points", fact)


def _check_fact(report, fact, declared):
    if isinstance(fact, RelationFact):
        arity = catalog.RELATIONS.get(fact.predicate)
        if arity is None:
            report.add("UnknownPredicate", fact.predicate, fact)
            return
        if tuple(len(a) for a in fact.args) != arity:
            report.add("ArityError", f"{fact.predicate} takes {arity} point counts", fact)
    elif isinstance(fact, MetricFact):
        if fact.quantity not in catalog.QUANTITIES:
            report.add("UnknownPredicate", fact.quantity, fact)
            return
        if not catalog.quantity_arity_ok(fact.quantity, len(fact.args)):
            report.add("ArityError", f"{fact.quantity} takes {catalog.describe_arity(fact.quantity)}", fact)
        _check_value(report, fact)
    for point in fact.points:
        if point not in declared:
            report.add("UndeclaredPoint", point, fact)


def validate(p: FormalProblem) -> ValidationReport:
    """Collect every violation; never raises."""
    report = ValidationReport()
    declared = set(p.points)
    _check_constructions(report, p)

    for fact in p.statement_facts:
        _check_fact(report, fact, declared)

    for channel, facts in (("text", p.text_facts), ("image", p.image_facts)):
        seen = set()
        for fact in facts:
            if fact in seen:
                report.add("DuplicateFact", f"stated twice in the {channel} channel", fact)
            seen.add(fact)
    for fact in set(p.text_facts) & set(p.image_facts):
        report.add("ChannelOverlap", "stated in both text and image channels", fact)

    heads = {}
    for fact in p.metric_facts:
        key = head_key(fact.quantity, fact.args)
        if key in heads and heads[key] != fact:
            report.add("DuplicateFact", f"{fact.quantity}({''.join(fact.args)}) stated with two values", fact)
        heads.setdefault(key, fact)

    goal = p.goal
    if goal is not None:
        if goal.quantity not in catalog.QUANTITIES:
            report.add("UnknownPredicate", goal.quantity, goal)
        else:
            if not catalog.quantity_arity_ok(goal.quantity, len(goal.args)):
                report.add("ArityError", f"{goal.quantity} takes {catalog.describe_arity(goal.quantity)}", goal)
            if head_key(goal.quantity, goal.args) in heads:
                report.add("GoalStatedAsPremise", f"{goal.quantity}({''.join(goal.args)})", goal)
        for point in goal.points:
            if point not in declared:
                report.add("UndeclaredPoint", point, goal)
    return report
