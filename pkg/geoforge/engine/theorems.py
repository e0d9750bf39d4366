"""
Theorem library for forward chaining

Each rule inspects the store and yields Bindings: a hashable key naming the
instantiation, the premise fact ids, and the conclusions (relations,
equations or determinations). Rules never mutate the store.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, Iterable, Optional

from ..cdl.facts import RelationFact
from ..errors import InconsistentFacts
from . import equations as E
from .store import Binding, FactStore, relation_key
from .symbols import Determination, QuantitySymbol

RIGHT = 90
STRAIGHT = 180


@dataclass(frozen=True)
class Theorem:
    id: str
    description: str
    match: Callable[[FactStore], Iterable[Optional[Binding]]]


THEOREMS: Dict[str, Theorem] = {}


def theorem(tid, description):
    def register(fn):
        THEOREMS[tid] = Theorem(tid, description, fn)
        return fn

    return register


def _bind(tid, key, premises, conclusions) -> Optional[Binding]:
    conclusions = tuple(c for c in conclusions if c is not None)
    if not conclusions:
        return None
    return Binding(tid, key, tuple(sorted(set(premises))), conclusions)


def _lin(pairs, constant=0):
    pairs = list(pairs)
    if any(s is None for s, _ in pairs):
        return None
    return E.linear(pairs, constant)


def _eq(a, b):
    if a is None or b is None:
        return None
    return E.equal(a, b)


def _fixed(symbol, value):
    return None if symbol is None else E.fixed(symbol, value)


def _prod(pairs, constant):
    pairs = list(pairs)
    if any(s is None for s, _ in pairs):
        return None
    return E.product(pairs, constant)


def _q(kind, *args):
    return QuantitySymbol(kind, tuple(args))


# triangles and lines


@theorem("triangle_angle_sum", "The interior angles of a triangle sum to 180 degrees.")
def _triangle_angle_sum(store):
    F = store.figure
    for tri in F.triangles:
        a, b, c = tri
        eq = _lin([(F.angle(b, a, c), 1), (F.angle(a, b, c), 1), (F.angle(a, c, b), 1)], -STRAIGHT)
        yield _bind("triangle_angle_sum", tri, F.triangle_sources(tri), [eq])


@theorem("triangle_exterior_angle", "An exterior angle equals the sum of the two remote interior angles.")
def _triangle_exterior_angle(store):
    F = store.figure
    for tri in F.triangles:
        for v in tri:
            u, w = (p for p in tri if p != v)
            for near, far in ((u, w), (w, u)):
                x = F.opposite(v, near)
                if x is None:
                    continue
                eq = _lin([(F.angle(x, v, far), 1), (F.angle(v, near, far), -1), (F.angle(near, far, v), -1)])
                yield _bind("triangle_exterior_angle", (tri, v, x), F.triangle_sources(tri), [eq])


@theorem("vertical_angles", "Vertically opposite angles are equal.")
def _vertical_angles(store):
    F = store.figure
    for v in F.points:
        inner = [line for line in F.lines_at(v) if 0 < line.index(v) < len(line.points) - 1]
        for l1, l2 in combinations(inner, 2):
            a, a2 = l1.points[0], l1.points[-1]
            c, c2 = l2.points[0], l2.points[-1]
            eqs = [_eq(F.angle(a, v, c), F.angle(a2, v, c2)), _eq(F.angle(a, v, c2), F.angle(a2, v, c))]
            yield _bind("vertical_angles", (v, l1.points, l2.points), l1.sources | l2.sources, eqs)


@theorem("linear_pair", "Adjacent angles on a straight line sum to 180 degrees.")
def _linear_pair(store):
    F = store.figure
    for v in F.points:
        for line in F.lines_at(v):
            if not 0 < line.index(v) < len(line.points) - 1:
                continue
            a, a2 = line.points[0], line.points[-1]
            for p in F.rays_at(v):
                if p in line.points:
                    continue
                eq = _lin([(F.angle(a, v, p), 1), (F.angle(p, v, a2), 1)], -STRAIGHT)
                yield _bind("linear_pair", (v, line.points, p), line.sources | F.edge_sources(v, p), [eq])


@theorem("line_addition", "Collinear segments add up along their line.")
def _line_addition(store):
    F = store.figure
    for line in F.lines:
        for p, m, q in combinations(line.points, 3):
            eq = _lin([(F.seg(p, m), 1), (F.seg(m, q), 1), (F.seg(p, q), -1)])
            yield _bind("line_addition", (p, m, q), line.sources, [eq])


@theorem("angle_addition", "A cevian splits the vertex angle into two parts that add up to it.")
def _angle_addition(store):
    F = store.figure
    for tri in F.triangles:
        for a in tri:
            b, c = (p for p in tri if p != a)
            for d in F.line_through(b, c).points:
                if not F.between(b, d, c) or not F.joined(a, d):
                    continue
                eq = _lin([(F.angle(b, a, d), 1), (F.angle(d, a, c), 1), (F.angle(b, a, c), -1)])
                premises = F.triangle_sources(tri) + F.sources((a, d))
                yield _bind("angle_addition", (tri, a, d), premises, [eq])


# parallel lines


def _transversals(store):
    """(relation key, premises, P, Q, +u at P, -u at P, +u at Q, -u at Q) for every
    transversal PQ crossing a pair of parallel lines."""
    F = store.figure
    for fid, rel in store.relations_of("ParallelBetweenLine"):
        (a, b), (c, d) = rel.args
        l1, l2 = F.line_through(a, b), F.line_through(c, d)
        if l1 is None or l2 is None or l1 is l2:
            continue
        fwd1 = l1.index(b) > l1.index(a)
        fwd2 = l2.index(d) > l2.index(c)
        for p in l1.points:
            if p in l2.points:
                continue
            for q in l2.points:
                if q in l1.points or not F.joined(p, q):
                    continue
                cross = F.line_through(p, q)
                premises = (fid,) + tuple(l1.sources | l2.sources | cross.sources)
                rays = (
                    F.ray_along(l1, p, fwd1),
                    F.ray_along(l1, p, not fwd1),
                    F.ray_along(l2, q, fwd2),
                    F.ray_along(l2, q, not fwd2),
                )
                yield (relation_key(rel), premises, p, q) + rays


@theorem("parallel_alternate_interior_angles", "Alternate interior angles of parallel lines are equal.")
def _parallel_alternate(store):
    F = store.figure
    for key, premises, p, q, pu, pd, qu, qd in _transversals(store):
        eqs = [_eq(F.angle(pu, p, q), F.angle(qd, q, p)), _eq(F.angle(pd, p, q), F.angle(qu, q, p))]
        yield _bind("parallel_alternate_interior_angles", (key, p, q), premises, eqs)


@theorem("parallel_corresponding_angles", "Corresponding angles of parallel lines are equal.")
def _parallel_corresponding(store):
    F = store.figure
    for key, premises, p, q, pu, pd, qu, qd in _transversals(store):
        xp, xq = F.opposite(p, q), F.opposite(q, p)
        eqs = [
            _eq(F.angle(pu, p, xp), F.angle(qu, q, p)),
            _eq(F.angle(pd, p, xp), F.angle(qd, q, p)),
            _eq(F.angle(qu, q, xq), F.angle(pu, p, q)),
            _eq(F.angle(qd, q, xq), F.angle(pd, p, q)),
        ]
        yield _bind("parallel_corresponding_angles", (key, p, q), premises, eqs)


@theorem("parallel_co_interior_angles", "Co-interior angles of parallel lines sum to 180 degrees.")
def _parallel_co_interior(store):
    F = store.figure
    for key, premises, p, q, pu, pd, qu, qd in _transversals(store):
        eqs = [
            _lin([(F.angle(pu, p, q), 1), (F.angle(qu, q, p), 1)], -STRAIGHT),
            _lin([(F.angle(pd, p, q), 1), (F.angle(qd, q, p), 1)], -STRAIGHT),
        ]
        yield _bind("parallel_co_interior_angles", (key, p, q), premises, eqs)


# special triangles


@theorem("isosceles_triangle_property_angle_equal", "The base angles of an isosceles triangle are equal.")
def _isosceles_angles(store):
    F = store.figure
    for fid, rel in store.relations_of("IsoscelesTriangle"):
        a, b, c = rel.args[0]
        yield _bind("isosceles_triangle_property_angle_equal", relation_key(rel), (fid,), [_eq(F.angle(a, b, c), F.angle(a, c, b))])


@theorem("isosceles_triangle_property_line_equal", "The legs of an isosceles triangle are equal.")
def _isosceles_sides(store):
    F = store.figure
    for fid, rel in store.relations_of("IsoscelesTriangle"):
        a, b, c = rel.args[0]
        yield _bind("isosceles_triangle_property_line_equal", relation_key(rel), (fid,), [_eq(F.seg(a, b), F.seg(a, c))])


@theorem("equilateral_triangle_property", "An equilateral triangle has equal sides and 60 degree angles.")
def _equilateral(store):
    F = store.figure
    for fid, rel in store.relations_of("EquilateralTriangle"):
        a, b, c = rel.args[0]
        eqs = [
            _eq(F.seg(a, b), F.seg(b, c)),
            _eq(F.seg(b, c), F.seg(c, a)),
            _fixed(F.angle(b, a, c), 60),
            _fixed(F.angle(a, b, c), 60),
            _fixed(F.angle(a, c, b), 60),
        ]
        yield _bind("equilateral_triangle_property", relation_key(rel), (fid,), eqs)


@theorem("right_triangle_judgment_angle", "A triangle with a 90 degree angle is a right triangle.")
def _right_by_angle(store):
    F = store.figure
    for tri in F.triangles:
        for v in tri:
            a, c = (p for p in tri if p != v)
            symbol = F.angle(a, v, c)
            value = store.value(symbol)
            if value is None or not E.close(value, RIGHT, E.SATISFY_TOL):
                continue
            rel = RelationFact("RightTriangle", ((a, v, c),))
            if store.has_relation(rel):
                continue
            premises = F.triangle_sources(tri) + store.value_premises(symbol)
            yield _bind("right_triangle_judgment_angle", (tri, v), premises, [rel])


@theorem("right_triangle_property_pythagorean", "In a right triangle the legs squared sum to the hypotenuse squared.")
def _pythagorean(store):
    F = store.figure
    for fid, rel in store.relations_of("RightTriangle"):
        a, b, c = rel.args[0]
        sides = (F.seg(a, b), F.seg(b, c), F.seg(a, c))
        eqs = [E.squares([(sides[0], 1), (sides[1], 1), (sides[2], -1)]), _fixed(F.angle(a, b, c), RIGHT)]
        yield _bind("right_triangle_property_pythagorean", relation_key(rel), (fid,), eqs)


@theorem("right_triangle_judgment_pythagorean_inverse", "Sides satisfying a^2 + b^2 = c^2 form a right triangle.")
def _right_by_sides(store):
    F = store.figure
    for tri in F.triangles:
        for v in tri:
            a, c = (p for p in tri if p != v)
            legs = (F.seg(a, v), F.seg(v, c))
            hyp = F.seg(a, c)
            values = [store.value(s) for s in legs + (hyp,)]
            if any(x is None for x in values):
                continue
            if not E.close(values[0] * values[0] + values[1] * values[1], values[2] * values[2], E.SATISFY_TOL):
                continue
            rel = RelationFact("RightTriangle", ((a, v, c),))
            if store.has_relation(rel):
                continue
            premises = F.triangle_sources(tri) + store.value_premises(*legs, hyp)
            yield _bind("right_triangle_judgment_pythagorean_inverse", (tri, v), premises, [rel])


# perpendiculars and cevians


@theorem("perpendicular_property", "Perpendicular lines meet at 90 degree angles.")
def _perpendicular(store):
    F = store.figure
    for fid, rel in store.relations_of("PerpendicularBetweenLine"):
        l1, l2 = F.line_through(*rel.args[0]), F.line_through(*rel.args[1])
        if l1 is None or l2 is None or l1 is l2:
            continue
        common = [p for p in l1.points if p in l2.points]
        if len(common) != 1:
            continue
        v = common[0]
        rays1 = [r for r in F.rays_at(v) if r in l1.points]
        rays2 = [r for r in F.rays_at(v) if r in l2.points]
        eqs = [_fixed(F.angle(r1, v, r2), RIGHT) for r1 in rays1 for r2 in rays2]
        yield _bind("perpendicular_property", relation_key(rel), (fid,) + tuple(l1.sources | l2.sources), eqs)


@theorem("midpoint_property", "A midpoint splits its segment into two equal halves.")
def _midpoint(store):
    F = store.figure
    for fid, rel in store.relations_of("IsMidpointOfLine"):
        (m,), (a, b) = rel.args
        eqs = [_eq(F.seg(a, m), F.seg(m, b)), _lin([(F.seg(a, b), 1), (F.seg(a, m), -2)])]
        yield _bind("midpoint_property", relation_key(rel), (fid,), eqs)


@theorem("angle_bisector_property", "An angle bisector splits the angle into two equal halves.")
def _bisector(store):
    F = store.figure
    for fid, rel in store.relations_of("IsBisectorOfAngle"):
        (v, d), (a, b, c) = rel.args
        if v != b:
            continue
        eqs = [_eq(F.angle(a, b, d), F.angle(d, b, c)), _lin([(F.angle(a, b, c), 1), (F.angle(a, b, d), -2)])]
        yield _bind("angle_bisector_property", relation_key(rel), (fid,), eqs)


@theorem("median_property", "A median meets the opposite side at its midpoint.")
def _median(store):
    F = store.figure
    for fid, rel in store.relations_of("IsMedianOfTriangle"):
        (_, d), (_, b, c) = rel.args
        eqs = [_eq(F.seg(b, d), F.seg(d, c)), _lin([(F.seg(b, c), 1), (F.seg(b, d), -2)])]
        yield _bind("median_property", relation_key(rel), (fid,), eqs)


@theorem("altitude_property", "An altitude is perpendicular to the side it falls on.")
def _altitude(store):
    F = store.figure
    for fid, rel in store.relations_of("IsAltitudeOfTriangle"):
        (a, d), (_, b, c) = rel.args
        eqs = [_fixed(F.angle(a, d, b), RIGHT), _fixed(F.angle(a, d, c), RIGHT)]
        yield _bind("altitude_property", relation_key(rel), (fid,), eqs)


# quadrilaterals


@theorem("parallelogram_property_opposite_sides", "Opposite sides of a parallelogram are equal.")
def _parallelogram_sides(store):
    F = store.figure
    for fid, rel in store.relations_of("Parallelogram"):
        a, b, c, d = rel.args[0]
        eqs = [_eq(F.seg(a, b), F.seg(c, d)), _eq(F.seg(b, c), F.seg(d, a))]
        yield _bind("parallelogram_property_opposite_sides", relation_key(rel), (fid,), eqs)


@theorem("parallelogram_property_opposite_angles", "Opposite angles of a parallelogram are equal.")
def _parallelogram_angles(store):
    F = store.figure
    for fid, rel in store.relations_of("Parallelogram"):
        a, b, c, d = rel.args[0]
        eqs = [_eq(F.angle(d, a, b), F.angle(b, c, d)), _eq(F.angle(a, b, c), F.angle(c, d, a))]
        yield _bind("parallelogram_property_opposite_angles", relation_key(rel), (fid,), eqs)


@theorem("parallelogram_property_parallel", "Opposite sides of a parallelogram are parallel.")
def _parallelogram_parallel(store):
    for fid, rel in store.relations_of("Parallelogram"):
        a, b, c, d = rel.args[0]
        rels = [
            RelationFact("ParallelBetweenLine", ((a, b), (d, c))),
            RelationFact("ParallelBetweenLine", ((a, d), (b, c))),
        ]
        yield _bind("parallelogram_property_parallel", relation_key(rel), (fid,), rels)


@theorem("rectangle_property", "A rectangle is a parallelogram with right angles and equal diagonals.")
def _rectangle(store):
    F = store.figure
    for fid, rel in store.relations_of("Rectangle"):
        a, b, c, d = rel.args[0]
        conclusions = [
            RelationFact("Parallelogram", ((a, b, c, d),)),
            _fixed(F.angle(d, a, b), RIGHT),
            _fixed(F.angle(a, b, c), RIGHT),
            _fixed(F.angle(b, c, d), RIGHT),
            _fixed(F.angle(c, d, a), RIGHT),
            _eq(F.seg(a, c), F.seg(b, d)),
        ]
        yield _bind("rectangle_property", relation_key(rel), (fid,), conclusions)


@theorem("square_property", "A square is a rectangle with equal adjacent sides.")
def _square(store):
    F = store.figure
    for fid, rel in store.relations_of("Square"):
        a, b, c, d = rel.args[0]
        conclusions = [RelationFact("Rectangle", ((a, b, c, d),)), _eq(F.seg(a, b), F.seg(b, c))]
        yield _bind("square_property", relation_key(rel), (fid,), conclusions)


# similar and congruent triangles


def _corresponding(rel):
    (a, b, c), (d, e, f) = rel.args
    return (a, b, c), (d, e, f)


@theorem("similar_triangle_property_angle_equal", "Corresponding angles of similar triangles are equal.")
def _similar_angles(store):
    F = store.figure
    for fid, rel in store.relations_of("SimilarBetweenTriangle"):
        (a, b, c), (d, e, f) = _corresponding(rel)
        eqs = [
            _eq(F.angle(c, a, b), F.angle(f, d, e)),
            _eq(F.angle(a, b, c), F.angle(d, e, f)),
            _eq(F.angle(b, c, a), F.angle(e, f, d)),
        ]
        yield _bind("similar_triangle_property_angle_equal", relation_key(rel), (fid,), eqs)


@theorem("similar_triangle_property_line_ratio", "Corresponding sides of similar triangles are proportional.")
def _similar_ratio(store):
    F = store.figure
    for fid, rel in store.relations_of("SimilarBetweenTriangle"):
        (a, b, c), (d, e, f) = _corresponding(rel)
        ab, bc, ca = F.seg(a, b), F.seg(b, c), F.seg(c, a)
        de, ef, fd = F.seg(d, e), F.seg(e, f), F.seg(f, d)
        eqs = [
            _prod([(ab, 1), (de, -1), (bc, -1), (ef, 1)], 1),
            _prod([(bc, 1), (ef, -1), (ca, -1), (fd, 1)], 1),
        ]
        yield _bind("similar_triangle_property_line_ratio", relation_key(rel), (fid,), eqs)


@theorem("congruent_triangle_property", "Corresponding sides and angles of congruent triangles are equal.")
def _congruent(store):
    F = store.figure
    for fid, rel in store.relations_of("CongruentBetweenTriangle"):
        (a, b, c), (d, e, f) = _corresponding(rel)
        eqs = [
            _eq(F.seg(a, b), F.seg(d, e)),
            _eq(F.seg(b, c), F.seg(e, f)),
            _eq(F.seg(c, a), F.seg(f, d)),
            _eq(F.angle(c, a, b), F.angle(f, d, e)),
            _eq(F.angle(a, b, c), F.angle(d, e, f)),
            _eq(F.angle(b, c, a), F.angle(e, f, d)),
        ]
        yield _bind("congruent_triangle_property", relation_key(rel), (fid,), eqs)


# circles


@theorem("circle_property_radius", "Every point on a circle lies one radius from its center.")
def _radius(store):
    F = store.figure
    for center, circle in sorted(F.circles.items()):
        for p in circle.points:
            eq = _eq(F.seg(center, p), _q("RadiusOfCircle", center))
            yield _bind("circle_property_radius", (center, p), circle.sources, [eq])


@theorem("circle_property_diameter", "A diameter is twice the radius.")
def _diameter_radius(store):
    for center, circle in sorted(store.figure.circles.items()):
        eq = _lin([(_q("DiameterOfCircle", center), 1), (_q("RadiusOfCircle", center), -2)])
        yield _bind("circle_property_diameter", (center,), circle.sources, [eq])


@theorem("diameter_property", "A diameter chord has the diameter's length and is bisected by the center.")
def _diameter(store):
    F = store.figure
    for fid, rel in store.relations_of("IsDiameterOfCircle"):
        (a, b), (o,) = rel.args
        eqs = [_eq(F.seg(a, b), _q("DiameterOfCircle", o)), _eq(F.seg(a, o), F.seg(o, b))]
        yield _bind("diameter_property", relation_key(rel), (fid,), eqs)


@theorem("diameter_right_inscribed_angle", "An angle inscribed in a semicircle is a right angle.")
def _thales(store):
    F = store.figure
    for fid, rel in store.relations_of("IsDiameterOfCircle"):
        (a, b), (o,) = rel.args
        circle = F.circles.get(o)
        if circle is None:
            continue
        for c in circle.points:
            if c in (a, b) or not (F.joined(c, a) and F.joined(c, b)):
                continue
            premises = (fid,) + tuple(circle.sources) + F.sources((c, a), (c, b))
            yield _bind("diameter_right_inscribed_angle", (relation_key(rel), c), premises, [_fixed(F.angle(a, c, b), RIGHT)])


def _arcs(circle, a, b):
    """Points strictly inside the two arcs cut off by chord ab, or None when
    the circle's point order is not known to be counter-clockwise."""
    if len(circle.sources) != 1:
        return None
    pts = circle.points
    i, j = sorted((pts.index(a), pts.index(b)))
    return pts[i + 1 : j], pts[j + 1 :] + pts[:i]


def _standing(F, arc, a, b):
    return [c for c in arc if F.joined(c, a) and F.joined(c, b)]


@theorem("inscribed_angle_theorem", "An inscribed angle is half the central angle on the same chord.")
def _inscribed(store):
    F = store.figure
    for o, circle in sorted(F.circles.items()):
        for a, b in combinations(circle.points, 2):
            if not (F.joined(o, a) and F.joined(o, b)) or F.collinear(a, o, b):
                continue
            arcs = _arcs(circle, a, b)
            # with vertices on both arcs the major one is unknown
            if arcs is not None and all(_standing(F, arc, a, b) for arc in arcs):
                continue
            for c in circle.points:
                if c in (a, b) or not (F.joined(c, a) and F.joined(c, b)):
                    continue
                eq = _lin([(F.angle(a, c, b), 1), (F.angle(a, o, b), Fraction(-1, 2))])
                premises = tuple(circle.sources) + F.sources((o, a), (o, b), (c, a), (c, b))
                yield _bind("inscribed_angle_theorem", (o, a, b, c), premises, [eq])


@theorem("inscribed_angle_same_arc", "Inscribed angles standing on the same arc are equal.")
def _same_arc(store):
    F = store.figure
    for o, circle in sorted(F.circles.items()):
        for a, b in combinations(circle.points, 2):
            arcs = _arcs(circle, a, b)
            if arcs is None:
                continue
            for arc in arcs:
                for c, d in combinations(_standing(F, arc, a, b), 2):
                    eq = _eq(F.angle(a, c, b), F.angle(a, d, b))
                    premises = tuple(circle.sources) + F.sources((c, a), (c, b), (d, a), (d, b))
                    yield _bind("inscribed_angle_same_arc", (o, a, b, c, d), premises, [eq])


@theorem("cyclic_quadrilateral_opposite_angles", "Opposite angles of a quadrilateral inscribed in a circle sum to 180 degrees.")
def _cyclic_quadrilateral(store):
    F = store.figure
    for o, circle in sorted(F.circles.items()):
        for a, b in combinations(circle.points, 2):
            arcs = _arcs(circle, a, b)
            if arcs is None:
                continue
            near, far = (_standing(F, arc, a, b) for arc in arcs)
            for c in near:
                for d in far:
                    eq = _lin([(F.angle(a, c, b), 1), (F.angle(a, d, b), 1)], -STRAIGHT)
                    premises = tuple(circle.sources) + F.sources((c, a), (c, b), (d, a), (d, b))
                    yield _bind("cyclic_quadrilateral_opposite_angles", (o, a, b, c, d), premises, [eq])


@theorem("tangent_property", "A tangent is perpendicular to the radius at the point of contact.")
def _tangent(store):
    F = store.figure
    for fid, rel in store.relations_of("IsTangentOfCircle"):
        (p, a), (o,) = rel.args
        yield _bind("tangent_property", relation_key(rel), (fid,), [_fixed(F.angle(p, a, o), RIGHT)])


# perimeter, area, arc


def _perimeter(store, size, tid):
    F = store.figure
    for vertices, sources in store.shapes(size):
        n = len(vertices)
        pairs = [(F.polygon_symbol("PerimeterOf", vertices), 1)]
        pairs += [(F.seg(vertices[i], vertices[(i + 1) % n]), -1) for i in range(n)]
        yield _bind(tid, vertices, sources, [_lin(pairs)])


@theorem("triangle_perimeter_definition", "A triangle's perimeter is the sum of its sides.")
def _triangle_perimeter(store):
    return _perimeter(store, 3, "triangle_perimeter_definition")


@theorem("quadrilateral_perimeter_definition", "A quadrilateral's perimeter is the sum of its sides.")
def _quadrilateral_perimeter(store):
    return _perimeter(store, 4, "quadrilateral_perimeter_definition")


@theorem("triangle_area_altitude", "A triangle's area is half the base times the altitude.")
def _area_altitude(store):
    F = store.figure
    for fid, rel in store.relations_of("IsAltitudeOfTriangle"):
        (a, d), (_, b, c) = rel.args
        if d in (b, c):
            continue
        area = F.polygon_symbol("AreaOf", (a, b, c))
        eq = _prod([(area, 1), (F.seg(b, c), -1), (F.seg(a, d), -1)], Fraction(1, 2))
        yield _bind("triangle_area_altitude", relation_key(rel), (fid,), [eq])


@theorem("right_triangle_area", "A right triangle's area is half the product of its legs.")
def _right_area(store):
    F = store.figure
    for fid, rel in store.relations_of("RightTriangle"):
        a, b, c = rel.args[0]
        area = F.polygon_symbol("AreaOf", (a, b, c))
        eq = _prod([(area, 1), (F.seg(a, b), -1), (F.seg(b, c), -1)], Fraction(1, 2))
        yield _bind("right_triangle_area", relation_key(rel), (fid,), [eq])


def heron(a, b, c):
    """Area from three sides; exact when the square root is rational."""
    s = (a + b + c) / 2
    square = s * (s - a) * (s - b) * (s - c)
    if float(square) <= 0:
        raise InconsistentFacts(f"sides {float(a):g}, {float(b):g}, {float(c):g} do not form a triangle")
    return E.exact_sqrt(square)


@theorem("triangle_area_heron", "Heron's formula gives a triangle's area from its three sides.")
def _heron(store):
    F = store.figure
    for vertices, sources in store.shapes(3):
        a, b, c = vertices
        area = F.polygon_symbol("AreaOf", vertices)
        if store.value(area) is not None:
            continue
        sides = (F.seg(a, b), F.seg(b, c), F.seg(c, a))
        values = [store.value(s) for s in sides]
        if any(v is None for v in values):
            continue
        conclusion = Determination(area, heron(*values))
        yield _bind("triangle_area_heron", vertices, sources + store.value_premises(*sides), [conclusion])


@theorem("rectangle_area", "A rectangle's area is the product of two adjacent sides.")
def _rectangle_area(store):
    F = store.figure
    for fid, rel in store.relations_of("Rectangle"):
        a, b, c, d = rel.args[0]
        area = F.polygon_symbol("AreaOf", (a, b, c, d))
        eq = _prod([(area, 1), (F.seg(a, b), -1), (F.seg(b, c), -1)], 1)
        yield _bind("rectangle_area", relation_key(rel), (fid,), [eq])


@theorem("arc_length_definition", "An arc's length is the radius times its central angle in radians.")
def _arc_length(store):
    F = store.figure
    for symbol in store.mentioned:
        if symbol.kind != "LengthOfArc":
            continue
        o, a, b = symbol.args
        circle = F.circles.get(o)
        pairs = [(symbol, 1), (_q("RadiusOfCircle", o), -1), (F.angle(a, o, b), -1)]
        eq = _prod(pairs, math.pi / STRAIGHT)
        yield _bind("arc_length_definition", symbol.args, circle.sources if circle else (), [eq])
