"""
Diagram rendering: an accepted layout drawn as SVG and rasterized to PNG,
with the image-channel values written onto the figure
"""

from __future__ import annotations

import io
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from PIL import Image, ImageDraw, ImageFont

from .cdl.facts import FormalProblem, MetricFact
from .engine.figure import Figure
from .errors import AnnotationOverflow
from .layout.optimize import LayoutSolution
from .layout.residuals import CANVAS_HEIGHT, CANVAS_WIDTH
from .log import debug_log

SIZES = (112, 224, 336)
BASE_EDGE = 224
BASE_STROKE = 2.0
BASE_FONT = 12
ANGLE_RADIUS = 0.22  # canvas units
LEGEND_KINDS = ("RadiusOfCircle", "DiameterOfCircle", "PerimeterOf", "AreaOf", "LengthOfArc")
NARROW_WEDGE = 20.0  # degrees

SVG_NS = "http://www.w3.org/2000/svg"
ET.register_namespace("", SVG_NS)

Box = Tuple[float, float, float, float]


def canvas_size(short_edge: int) -> Tuple[int, int]:
    """Landscape 4:3 canvas for a shorter edge of 112, 224 or 336 pixels."""
    if short_edge not in SIZES:
        raise ValueError(f"unsupported image size {short_edge}; choose one of {SIZES}")
    return round(short_edge * 4 / 3), short_edge


def length_text(value) -> str:
    """At most 4 significant digits, trailing zeros trimmed."""
    value = float(value)
    if abs(value) >= 1e4:
        return str(round(value))
    text = f"{value:.4g}"
    if "e" in text:
        text = f"{value:.4f}".rstrip("0").rstrip(".")
    return text


def annotation_text(fact: MetricFact) -> str:
    value = length_text(fact.value)
    q, args = fact.quantity, "".join(fact.args)
    if q == "MeasureOfAngle":
        return f"{value}°"
    if q == "LengthOfLine":
        return value
    if q == "RadiusOfCircle":
        return f"r({args}) = {value}"
    if q == "DiameterOfCircle":
        return f"d({args}) = {value}"
    if q == "PerimeterOf":
        return f"P({args}) = {value}"
    if q == "AreaOf":
        return f"S({args}) = {value}"
    return f"arc {''.join(fact.args[1:])} = {value}"


@dataclass(frozen=True)
class Annotation:
    fact: MetricFact
    text: str

    @property
    def kind(self) -> str:
        if self.fact.quantity == "LengthOfLine":
            return "segment"
        if self.fact.quantity == "MeasureOfAngle":
            return "angle"
        return "legend"


@dataclass(frozen=True)
class DiagramSpec:
    layout: LayoutSolution
    segments: Tuple[Tuple[str, str], ...]
    circles: Tuple[Tuple[str, float], ...]
    points: Tuple[str, ...]
    annotations: Tuple[Annotation, ...]
    short_edge: int = BASE_EDGE

    @property
    def size(self) -> Tuple[int, int]:
        return canvas_size(self.short_edge)

    @property
    def stroke(self) -> float:
        return BASE_STROKE * self.short_edge / BASE_EDGE

    @property
    def font_size(self) -> int:
        return max(8, round(BASE_FONT * self.short_edge / BASE_EDGE))

    @property
    def unit(self) -> float:
        """Pixels per canvas unit; one factor for both axes."""
        width, height = self.size
        return min(width / CANVAS_WIDTH, height / CANVAS_HEIGHT)

    def to_pixel(self, x, y) -> Tuple[float, float]:
        width, height = self.size
        k = self.unit
        ox = (width - CANVAS_WIDTH * k) / 2
        oy = (height - CANVAS_HEIGHT * k) / 2
        return ox + x * k, height - oy - y * k

    def pixel(self, p) -> Tuple[float, float]:
        return self.to_pixel(*self.layout.coordinates[p])


def diagram_spec(problem: FormalProblem, layout: LayoutSolution, short_edge: int = BASE_EDGE) -> DiagramSpec:
    """Collect what to stroke and annotate; annotations come from the image channel only."""
    canvas_size(short_edge)
    figure = Figure(problem.constructions)
    segments: List[Tuple[str, str]] = []
    for line in figure.lines:
        segments.append((line.points[0], line.points[-1]))
    covered = {frozenset(s) for line in figure.lines for s in zip(line.points, line.points[1:])}
    drawn = [f for f in problem.metric_facts if f.quantity == "LengthOfLine"]
    if problem.goal is not None and problem.goal.quantity == "LengthOfLine":
        drawn.append(problem.goal)
    for fact in drawn:
        pair = tuple(fact.args)
        if not figure.joined(*pair) and frozenset(pair) not in covered:
            segments.append(pair)
            covered.add(frozenset(pair))
    circles = tuple((c, layout.radii[c]) for c in figure.circles if c in layout.radii)
    annotations = tuple(
        Annotation(f, annotation_text(f)) for f in problem.image_facts if isinstance(f, MetricFact)
    )
    points = tuple(sorted(layout.coordinates))
    return DiagramSpec(layout, tuple(segments), circles, points, annotations, short_edge)


@lru_cache(maxsize=None)
def _font(size: int):
    return ImageFont.load_default(size=size)


def _text_size(text: str, size: int) -> Tuple[float, float]:
    left, top, right, bottom = _font(size).getbbox(text)
    return float(right - left), float(bottom - top)


@dataclass(frozen=True)
class Label:
    text: str
    x: float
    y: float
    width: float
    height: float
    kind: str
    fallback: bool = False

    @property
    def box(self) -> Box:
        return (self.x - self.width / 2, self.y - self.height / 2, self.x + self.width / 2, self.y + self.height / 2)


@dataclass(frozen=True)
class LabelSet:
    labels: Tuple[Label, ...]
    overflow: Tuple[str, ...] = ()

    @property
    def used_fallback(self) -> bool:
        return any(label.fallback for label in self.labels)


def _overlaps(a: Box, b: Box) -> bool:
    return a[0] < b[2] and b[0] < a[2] and a[1] < b[3] and b[1] < a[3]


def _inside(box: Box, width, height) -> bool:
    return box[0] >= 0 and box[1] >= 0 and box[2] <= width and box[3] <= height


def _unit(dx, dy, default=(0.0, -1.0)) -> Tuple[float, float]:
    n = math.hypot(dx, dy)
    return (dx / n, dy / n) if n > 1e-9 else default


def _rotate(d, degrees) -> Tuple[float, float]:
    t = math.radians(degrees)
    return d[0] * math.cos(t) - d[1] * math.sin(t), d[0] * math.sin(t) + d[1] * math.cos(t)


class _Placer:
    def __init__(self, spec: DiagramSpec):
        self.spec = spec
        self.width, self.height = spec.size
        self.placed: List[Label] = []
        self.overflow: List[str] = []

    def place(self, text, kind, candidates: Sequence[Tuple[float, float]], usable: Sequence[bool] = ()):
        """First candidate center whose box is inside the canvas and clear of
        earlier labels; candidate 0 is the preferred spot."""
        w, h = _text_size(text, self.spec.font_size)
        for i, (x, y) in enumerate(candidates):
            if usable and not usable[i]:
                continue
            label = Label(text, x, y, w, h, kind, fallback=i > 0)
            if _inside(label.box, self.width, self.height) and not any(
                _overlaps(label.box, other.box) for other in self.placed
            ):
                self.placed.append(label)
                return label
        x, y = candidates[0]
        x = min(max(x, w / 2), self.width - w / 2)
        y = min(max(y, h / 2), self.height - h / 2)
        label = Label(text, x, y, w, h, kind, fallback=True)
        self.placed.append(label)
        self.overflow.append(text)
        return label


def _centroid(spec: DiagramSpec) -> Tuple[float, float]:
    pts = [spec.pixel(p) for p in spec.points]
    return sum(x for x, _ in pts) / len(pts), sum(y for _, y in pts) / len(pts)


def place_labels(spec: DiagramSpec) -> LabelSet:
    """Legend first, then point labels, segment values and angle values, each
    trying its preferred offset and four fallbacks."""
    placer = _Placer(spec)
    if not spec.points:
        return LabelSet(())
    gap = spec.font_size * 0.9 + spec.stroke
    cx, cy = _centroid(spec)

    y = gap / 2
    for ann in spec.annotations:
        if ann.kind != "legend":
            continue
        w, h = _text_size(ann.text, spec.font_size)
        placer.place(ann.text, "legend", [(gap / 2 + w / 2, y + h / 2)])
        y += h + spec.font_size * 0.4

    for p in spec.points:
        px, py = spec.pixel(p)
        d = _unit(px - cx, py - cy)
        dirs = [d] + [_rotate(d, a) for a in (60, -60, 120, -120)]
        placer.place(p, "point", [(px + gap * u, py + gap * v) for u, v in dirs])

    for ann in spec.annotations:
        if ann.kind == "segment":
            a, b = ann.fact.args
            (ax, ay), (bx, by) = spec.pixel(a), spec.pixel(b)
            mx, my = (ax + bx) / 2, (ay + by) / 2
            t = _unit(bx - ax, by - ay, (1.0, 0.0))
            n = (-t[1], t[0])
            if (mx - cx) * n[0] + (my - cy) * n[1] < 0:
                n = (-n[0], -n[1])
            off = gap
            candidates = [
                (mx + off * n[0], my + off * n[1]),
                (mx - off * n[0], my - off * n[1]),
                (mx + off * n[0] + off * t[0], my + off * n[1] + off * t[1]),
                (mx + off * n[0] - off * t[0], my + off * n[1] - off * t[1]),
                (mx + 2 * off * n[0], my + 2 * off * n[1]),
            ]
            placer.place(ann.text, "segment", candidates)
        elif ann.kind == "angle":
            a, v, c = ann.fact.args
            vx, vy = spec.pixel(v)
            u1 = _unit(*(q - r for q, r in zip(spec.pixel(a), (vx, vy))))
            u2 = _unit(*(q - r for q, r in zip(spec.pixel(c), (vx, vy))))
            wedge = math.degrees(math.acos(max(-1.0, min(1.0, u1[0] * u2[0] + u1[1] * u2[1]))))
            bis = _unit(u1[0] + u2[0], u1[1] + u2[1], (-u1[1], u1[0]))
            w, h = _text_size(ann.text, spec.font_size)
            r = ANGLE_RADIUS * spec.unit + math.hypot(w, h) / 2
            candidates = [(vx + k * r * bis[0], vy + k * r * bis[1]) for k in (1.0, 1.6, 2.2)]
            candidates += [(vx - r * bis[0], vy - r * bis[1]), (vx - 1.6 * r * bis[0], vy - 1.6 * r * bis[1])]
            usable = [wedge >= NARROW_WEDGE, True, True, True, True]
            placer.place(ann.text, "angle", candidates, usable)
    return LabelSet(tuple(placer.placed), tuple(placer.overflow))


@dataclass(frozen=True)
class RenderedDiagram:
    svg: str
    png: bytes
    width: int
    height: int
    labels: LabelSet


def _angle_arc(spec: DiagramSpec, fact: MetricFact):
    """Pixel arc (center, radius, start, end degrees clockwise) marking an angle."""
    a, v, c = fact.args
    vx, vy = spec.pixel(v)
    t1 = math.degrees(math.atan2(spec.pixel(a)[1] - vy, spec.pixel(a)[0] - vx)) % 360
    t2 = math.degrees(math.atan2(spec.pixel(c)[1] - vy, spec.pixel(c)[0] - vx)) % 360
    if (t2 - t1) % 360 > 180:
        t1, t2 = t2, t1
    return (vx, vy), ANGLE_RADIUS * spec.unit, t1, t2


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _svg(spec: DiagramSpec, labels: LabelSet) -> str:
    width, height = spec.size
    root = ET.Element(f"{{{SVG_NS}}}svg", {
        "width": str(width),
        "height": str(height),
        "viewBox": f"0 0 {width} {height}",
    })
    ET.SubElement(root, f"{{{SVG_NS}}}rect", {"width": "100%", "height": "100%", "fill": "white"})
    group = ET.SubElement(root, f"{{{SVG_NS}}}g", {
        "stroke": "black",
        "stroke-width": _fmt(spec.stroke),
        "fill": "none",
        "stroke-linecap": "round",
    })
    for p, q in spec.segments:
        (x1, y1), (x2, y2) = spec.pixel(p), spec.pixel(q)
        ET.SubElement(group, f"{{{SVG_NS}}}line", {"x1": _fmt(x1), "y1": _fmt(y1), "x2": _fmt(x2), "y2": _fmt(y2)})
    for center, radius in spec.circles:
        x, y = spec.pixel(center)
        ET.SubElement(group, f"{{{SVG_NS}}}circle", {"cx": _fmt(x), "cy": _fmt(y), "r": _fmt(radius * spec.unit)})
    for ann in spec.annotations:
        if ann.kind != "angle":
            continue
        (x, y), r, t1, t2 = _angle_arc(spec, ann.fact)
        sx, sy = x + r * math.cos(math.radians(t1)), y + r * math.sin(math.radians(t1))
        ex, ey = x + r * math.cos(math.radians(t2)), y + r * math.sin(math.radians(t2))
        path = f"M {_fmt(sx)} {_fmt(sy)} A {_fmt(r)} {_fmt(r)} 0 0 1 {_fmt(ex)} {_fmt(ey)}"
        ET.SubElement(group, f"{{{SVG_NS}}}path", {"d": path})
    dots = ET.SubElement(root, f"{{{SVG_NS}}}g", {"fill": "black"})
    for p in spec.points:
        x, y = spec.pixel(p)
        ET.SubElement(dots, f"{{{SVG_NS}}}circle", {"cx": _fmt(x), "cy": _fmt(y), "r": _fmt(spec.stroke * 1.2)})
    text = ET.SubElement(root, f"{{{SVG_NS}}}g", {
        "font-family": "sans-serif",
        "font-size": str(spec.font_size),
        "text-anchor": "middle",
        "dominant-baseline": "central",
        "fill": "black",
    })
    for label in labels.labels:
        node = ET.SubElement(text, f"{{{SVG_NS}}}text", {"x": _fmt(label.x), "y": _fmt(label.y)})
        node.text = label.text
    return ET.tostring(root, encoding="unicode")


def _png(spec: DiagramSpec, labels: LabelSet) -> bytes:
    width, height = spec.size
    image = Image.new("L", (width, height), 255)
    draw = ImageDraw.Draw(image)
    stroke = max(1, round(spec.stroke))
    for p, q in spec.segments:
        draw.line([spec.pixel(p), spec.pixel(q)], fill=0, width=stroke)
    for center, radius in spec.circles:
        x, y = spec.pixel(center)
        r = radius * spec.unit
        draw.ellipse([x - r, y - r, x + r, y + r], outline=0, width=stroke)
    for ann in spec.annotations:
        if ann.kind == "angle":
            (x, y), r, t1, t2 = _angle_arc(spec, ann.fact)
            draw.arc([x - r, y - r, x + r, y + r], t1, t2 if t2 > t1 else t2 + 360, fill=0, width=max(1, stroke - 1))
    dot = spec.stroke * 1.2
    for p in spec.points:
        x, y = spec.pixel(p)
        draw.ellipse([x - dot, y - dot, x + dot, y + dot], fill=0)
    font = _font(spec.font_size)
    for label in labels.labels:
        left, top, _, _ = font.getbbox(label.text)
        draw.text((label.x - label.width / 2 - left, label.y - label.height / 2 - top), label.text, fill=0, font=font)
    buffer = io.BytesIO()
    image.save(buffer, format="PNG")
    return buffer.getvalue()


def render_diagram(spec: DiagramSpec) -> RenderedDiagram:
    labels = place_labels(spec)
    if labels.overflow:
        debug_log(f"Label overflow: {', '.join(labels.overflow)}", "DEBUG")
        raise AnnotationOverflow(labels.overflow)
    width, height = spec.size
    return RenderedDiagram(_svg(spec, labels), _png(spec, labels), width, height, labels)


def drawn_values(diagram: RenderedDiagram) -> Dict[str, str]:
    """Annotation texts on the image keyed by kind, for channel checks."""
    return {label.text: label.kind for label in diagram.labels.labels if label.kind != "point"}


def find_label(labels: LabelSet, text: str) -> Optional[Label]:
    for label in labels.labels:
        if label.text == text:
            return label
    return None
