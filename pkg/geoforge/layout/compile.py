"""
Constraint compiler: construction and statement facts to residual terms
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import combinations
from typing import Dict, List, Sequence, Tuple

from ..cdl.facts import ConstructionFact, MetricFact, RelationFact
from ..cdl.printer import format_construction, format_fact
from ..engine.figure import Figure
from ..errors import UnmappablePredicate
from .residuals import CANVAS_HEIGHT, CANVAS_WIDTH, Residual

RIGHT = 90.0


@dataclass(frozen=True)
class ConstraintSystem:
    """Points in placement order, the residual terms over them and one radius
    variable per circle."""

    points: Tuple[str, ...]
    residuals: Tuple[Residual, ...]
    circles: Tuple[str, ...] = ()
    bounds: Tuple[float, float, float, float] = (0.0, 0.0, CANVAS_WIDTH, CANVAS_HEIGHT)

    @property
    def free_coordinates(self) -> int:
        return 2 * max(0, len(self.points) - 2)

    def by_kind(self, kind) -> Tuple[Residual, ...]:
        return tuple(r for r in self.residuals if r.kind == kind)


def _r(kind, points, source, **kw) -> Residual:
    return Residual(kind, tuple(points), source=source, **kw)


def _right_angles(quad, source):
    a, b, c, d = quad
    corners = ((d, a, b), (a, b, c), (b, c, d), (c, d, a))
    return [_r("FixedAngle", corner, source, target=RIGHT) for corner in corners]


def _equal_sides(quad, source):
    a, b, c, d = quad
    sides = ((a, b), (b, c), (c, d), (d, a))
    return [_r("EqualLength", sides[i] + sides[(i + 1) % 4], source) for i in range(4)]


def _parallel_sides(quad, source):
    a, b, c, d = quad
    return [_r("Parallel", (a, b, d, c), source), _r("Parallel", (a, d, b, c), source)]


def _relation_residuals(rel: RelationFact, source: str) -> List[Residual]:
    args = rel.args
    name = rel.predicate
    if name == "ParallelBetweenLine":
        return [_r("Parallel", args[0] + args[1], source)]
    if name == "PerpendicularBetweenLine":
        return [_r("Perpendicular", args[0] + args[1], source)]
    if name == "IsMidpointOfLine":
        return [_r("Midpoint", args[0] + args[1], source)]
    if name == "IsBisectorOfAngle":
        (v, d), (a, _, c) = args
        return [_r("EqualAngle", (a, v, d, d, v, c), source)]
    if name == "IsAltitudeOfTriangle":
        (a, d), (_, b, c) = args
        return [_r("Perpendicular", (a, d, b, c), source), _r("Collinear", (b, c, d), source)]
    if name == "IsMedianOfTriangle":
        (_, d), (_, b, c) = args
        return [_r("Midpoint", (d, b, c), source)]
    if name == "IsoscelesTriangle":
        a, b, c = args[0]
        return [_r("EqualLength", (a, b, a, c), source)]
    if name == "EquilateralTriangle":
        a, b, c = args[0]
        return [_r("EqualLength", (a, b, b, c), source), _r("EqualLength", (b, c, c, a), source)]
    if name == "RightTriangle":
        return [_r("FixedAngle", args[0], source, target=RIGHT)]
    if name == "Parallelogram":
        return _parallel_sides(args[0], source)
    if name == "Rectangle":
        return _right_angles(args[0], source)
    if name == "Square":
        return _equal_sides(args[0], source) + _right_angles(args[0], source)
    if name == "IsDiameterOfCircle":
        (a, b), (o,) = args
        return [_r("Midpoint", (o, a, b), source)]
    if name == "IsTangentOfCircle":
        (p, a), (o,) = args
        return [_r("Tangent", (p, a, o), source)]
    if name == "SimilarBetweenTriangle":
        (a, b, c), (d, e, f) = args
        return [
            _r("EqualAngle", (c, a, b, f, d, e), source),
            _r("EqualAngle", (a, b, c, d, e, f), source),
        ]
    if name == "CongruentBetweenTriangle":
        (a, b, c), (d, e, f) = args
        return [
            _r("EqualLength", (a, b, d, e), source),
            _r("EqualLength", (b, c, e, f), source),
            _r("EqualLength", (c, a, f, d), source),
        ]
    raise UnmappablePredicate(name)


def _metric_residuals(fact: MetricFact, source: str) -> List[Residual]:
    value = float(fact.value)
    args = fact.args
    q = fact.quantity
    if q == "LengthOfLine":
        return [_r("FixedLength", args, source, target=value, variant="segment")]
    if q == "MeasureOfAngle":
        return [_r("FixedAngle", args, source, target=value)]
    if q == "LengthOfArc":
        return [_r("FixedLength", args, source, target=value, variant="arc", circle=args[0])]
    if q == "RadiusOfCircle":
        return [_r("FixedLength", (), source, target=value, variant="radius", circle=args[0])]
    if q == "DiameterOfCircle":
        return [_r("FixedLength", (), source, target=value, variant="diameter", circle=args[0])]
    if q == "PerimeterOf":
        return [_r("FixedLength", args, source, target=value, variant="perimeter")]
    if q == "AreaOf":
        return [_r("FixedLength", args, source, target=value, variant="area")]
    raise UnmappablePredicate(q)


def _construction_residuals(fact: ConstructionFact) -> List[Residual]:
    source = format_construction(fact)
    if fact.kind == "Collinear":
        pts = fact.args[0]
        first, last = pts[0], pts[-1]
        return [_r("Collinear", (first, last, p), source) for p in pts[1:-1]]
    if fact.kind == "Cocircular":
        center = fact.center
        return [_r("OnCircle", (p, center), source, circle=center) for p in fact.args[1]]
    if fact.kind == "Shape":
        return [_r("NonDegeneracy", fact.vertices, source, variant="area")]
    raise UnmappablePredicate(fact.kind)


def map_fact(fact) -> List[Residual]:
    """Residual terms for one statement fact."""
    source = format_fact(fact)
    if isinstance(fact, RelationFact):
        return _relation_residuals(fact, source)
    if isinstance(fact, MetricFact):
        return _metric_residuals(fact, source)
    raise UnmappablePredicate(type(fact).__name__)


def _floors(figure: Figure, shapes: Sequence[Tuple[str, ...]]) -> List[Residual]:
    floors = []
    for p, q in combinations(sorted(figure.points), 2):
        floors.append(_r("NonDegeneracy", (p, q), "separation", variant="separation"))
    for tri in figure.triangles:
        if tri not in shapes:
            floors.append(_r("NonDegeneracy", tri, "triangle", variant="area"))
    for line in figure.lines:
        for i in range(1, len(line.points) - 1):
            trio = line.points[i - 1 : i + 2]
            floors.append(_r("NonDegeneracy", trio, "order", variant="between"))
    return floors


def order_points(system: ConstraintSystem) -> Tuple[str, ...]:
    """Descending constraint degree, ties alphabetical."""
    degree: Dict[str, int] = {p: 0 for p in system.points}
    for res in system.residuals:
        if res.kind == "NonDegeneracy":
            continue
        for p in set(res.points):
            degree[p] = degree.get(p, 0) + 1
    return tuple(sorted(degree, key=lambda p: (-degree[p], p)))


def compile_constraints(constructions, image_facts=(), text_facts=()) -> ConstraintSystem:
    """Map every construction and statement fact to residual terms.

    Text facts are enforced too, so the drawn figure agrees with the
    question; only image facts are annotated later.
    """
    constructions = tuple(constructions)
    figure = Figure(constructions)
    residuals: List[Residual] = []
    for fact in constructions:
        residuals += _construction_residuals(fact)
    for fact in tuple(text_facts) + tuple(image_facts):
        residuals += map_fact(fact)
    shapes = [tuple(sorted(f.vertices)) for f in constructions if f.kind == "Shape"]
    residuals += _floors(figure, shapes)

    points = list(figure.points)
    circles = list(figure.circles)
    for res in residuals:
        points += [p for p in res.points if p not in points]
        if res.circle is not None and res.circle not in circles:
            circles.append(res.circle)
    system = ConstraintSystem(tuple(points), tuple(residuals), tuple(circles))
    return replace(system, points=order_points(system))
