"""
Structure of a figure derived from its construction facts: lines, rays,
polygons, triangles and circles, plus canonical quantity symbols.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from ..cdl.facts import ConstructionFact
from .symbols import QuantitySymbol

Points = Tuple[str, ...]


@dataclass(frozen=True)
class Line:
    points: Points
    sources: FrozenSet[int]

    def index(self, p) -> int:
        return self.points.index(p)


@dataclass(frozen=True)
class Polygon:
    vertices: Points
    sources: FrozenSet[int]


@dataclass(frozen=True)
class Circle:
    center: str
    points: Points
    sources: FrozenSet[int]


def min_rotation(points: Sequence[str]) -> Points:
    """Smallest rotation of a cyclic sequence, read in either direction."""
    seqs = (tuple(points), tuple(reversed(points)))
    return min(seq[i:] + seq[:i] for seq in seqs for i in range(len(seq)))


class Figure:
    def __init__(self, constructions: Sequence[ConstructionFact]):
        self.points: Points = ()
        seen = {}
        for fact in constructions:
            for p in fact.points:
                seen.setdefault(p, None)
        self.points = tuple(seen)

        raw_lines: List[list] = []
        for fid, fact in enumerate(constructions):
            if fact.kind == "Collinear":
                self._merge_line(raw_lines, list(fact.args[0]), {fid})
        for fid, fact in enumerate(constructions):
            if fact.kind == "Shape":
                for p, q in fact.args:
                    self._merge_line(raw_lines, [p, q], {fid})
        self.lines: Tuple[Line, ...] = tuple(Line(tuple(pts), frozenset(src)) for pts, src in raw_lines)
        self._pair_line: Dict[FrozenSet[str], Line] = {}
        for line in self.lines:
            for p, q in combinations(line.points, 2):
                self._pair_line.setdefault(frozenset((p, q)), line)

        circles: Dict[str, list] = {}
        for fid, fact in enumerate(constructions):
            if fact.kind == "Cocircular":
                entry = circles.setdefault(fact.center, [[], set()])
                entry[0].extend(p for p in fact.args[1] if p not in entry[0])
                entry[1].add(fid)
        self.circles: Dict[str, Circle] = {
            c: Circle(c, tuple(pts), frozenset(src)) for c, (pts, src) in circles.items()
        }

        polygons: Dict[Points, Polygon] = {}
        for fid, fact in enumerate(constructions):
            if fact.kind != "Shape":
                continue
            vertices = self.reduce_polygon(fact.vertices)
            if len(vertices) < 3:
                continue
            key = min_rotation(vertices)
            if key in polygons:
                polygons[key] = Polygon(polygons[key].vertices, polygons[key].sources | {fid})
            else:
                polygons[key] = Polygon(vertices, frozenset({fid}))
        self.polygons: Tuple[Polygon, ...] = tuple(polygons.values())

        self.triangles: Tuple[Points, ...] = tuple(
            t
            for t in combinations(sorted(self.points), 3)
            if self.joined(t[0], t[1]) and self.joined(t[1], t[2]) and self.joined(t[0], t[2])
            and not self.collinear(*t)
        )

    @staticmethod
    def _merge_line(lines, points, sources):
        new = set(points)
        for entry in lines:
            old = set(entry[0])
            if new <= old:
                entry[1] |= sources
                return
            if old <= new and len(old) >= 2:
                entry[0] = points
                entry[1] |= sources
                return
        lines.append([points, set(sources)])

    # lines and rays

    def line_through(self, p, q) -> Optional[Line]:
        if p == q:
            return None
        return self._pair_line.get(frozenset((p, q)))

    def joined(self, p, q) -> bool:
        return self.line_through(p, q) is not None

    def collinear(self, a, b, c) -> bool:
        line = self.line_through(a, b)
        return line is not None and c in line.points

    def between(self, a, m, b) -> bool:
        line = self.line_through(a, b)
        if line is None or m not in line.points:
            return False
        i, j, k = line.index(a), line.index(m), line.index(b)
        return min(i, k) < j < max(i, k)

    def lines_at(self, v) -> Tuple[Line, ...]:
        return tuple(line for line in self.lines if v in line.points)

    def ray(self, v, p) -> str:
        """Farthest point on ray v->p; p itself when v and p are not joined."""
        line = self.line_through(v, p)
        if line is None:
            return p
        return line.points[-1] if line.index(p) > line.index(v) else line.points[0]

    def opposite(self, v, p) -> Optional[str]:
        """Farthest point on the ray from v pointing away from p, if drawn."""
        line = self.line_through(v, p)
        if line is None:
            return None
        i, j = line.index(v), line.index(p)
        if j > i:
            return line.points[0] if i > 0 else None
        return line.points[-1] if i < len(line.points) - 1 else None

    def rays_at(self, v) -> Tuple[str, ...]:
        rays = []
        for line in self.lines_at(v):
            i = line.index(v)
            if i > 0:
                rays.append(line.points[0])
            if i < len(line.points) - 1:
                rays.append(line.points[-1])
        return tuple(rays)

    def ray_along(self, line: Line, v, forward: bool) -> Optional[str]:
        """Ray from v along `line` toward increasing (forward) or decreasing index."""
        i = line.index(v)
        if forward:
            return line.points[-1] if i < len(line.points) - 1 else None
        return line.points[0] if i > 0 else None

    # quantities

    def angle(self, a, v, c) -> Optional[QuantitySymbol]:
        if None in (a, v, c) or v in (a, c) or a == c:
            return None
        ra, rc = self.ray(v, a), self.ray(v, c)
        if ra == rc:
            return None
        la, lc = self.line_through(v, a), self.line_through(v, c)
        if la is not None and la is lc:
            return None
        return QuantitySymbol("MeasureOfAngle", (min(ra, rc), v, max(ra, rc)))

    def seg(self, a, b) -> Optional[QuantitySymbol]:
        if a is None or b is None or a == b:
            return None
        return QuantitySymbol("LengthOfLine", tuple(sorted((a, b))))

    def reduce_polygon(self, vertices: Sequence[str]) -> Points:
        vs = list(vertices)
        changed = True
        while changed and len(vs) > 3:
            changed = False
            for i in range(len(vs)):
                prev, cur, nxt = vs[i - 1], vs[i], vs[(i + 1) % len(vs)]
                if self.between(prev, cur, nxt):
                    del vs[i]
                    changed = True
                    break
        return tuple(vs)

    def polygon_symbol(self, kind, vertices) -> QuantitySymbol:
        return QuantitySymbol(kind, min_rotation(self.reduce_polygon(vertices)))

    def symbol(self, quantity, args) -> Optional[QuantitySymbol]:
        """Canonical symbol for a quantity head, or None when degenerate."""
        args = tuple(args)
        if quantity == "LengthOfLine":
            return self.seg(*args)
        if quantity == "MeasureOfAngle":
            return self.angle(*args)
        if quantity in ("PerimeterOf", "AreaOf"):
            return self.polygon_symbol(quantity, args)
        return QuantitySymbol(quantity, args)

    # provenance

    def edge_sources(self, p, q) -> FrozenSet[int]:
        line = self.line_through(p, q)
        return line.sources if line is not None else frozenset()

    def sources(self, *pairs) -> Tuple[int, ...]:
        out = set()
        for p, q in pairs:
            out |= self.edge_sources(p, q)
        return tuple(sorted(out))

    def triangle_sources(self, tri) -> Tuple[int, ...]:
        a, b, c = tri
        return self.sources((a, b), (b, c), (a, c))
