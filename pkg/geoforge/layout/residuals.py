"""
Residual functions over point coordinates, with analytic Jacobians.

Every residual is zero exactly when its constraint holds. Incidence-type
residuals are distances divided by the canvas diagonal; metric residuals
are relative to their target, measured against the global scale variable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

CANVAS_WIDTH = 4.0
CANVAS_HEIGHT = 3.0
CANVAS_DIAGONAL = math.hypot(CANVAS_WIDTH, CANVAS_HEIGHT)
CANVAS_AREA = CANVAS_WIDTH * CANVAS_HEIGHT
CANVAS_CENTER = (CANVAS_WIDTH / 2, CANVAS_HEIGHT / 2)
PIN_OFFSET = (1.0, 0.0)

MIN_SEPARATION = 0.03 * CANVAS_DIAGONAL
MIN_AREA = 0.005 * CANVAS_AREA
BETWEEN_MARGIN = 0.02

INCIDENCE = "Incidence"
METRIC = "Metric"

KIND_CLASS = {
    "Collinear": INCIDENCE,
    "OnCircle": INCIDENCE,
    "Perpendicular": INCIDENCE,
    "Parallel": INCIDENCE,
    "Midpoint": INCIDENCE,
    "Tangent": INCIDENCE,
    "NonDegeneracy": INCIDENCE,
    "FixedLength": METRIC,
    "EqualLength": METRIC,
    "FixedAngle": METRIC,
    "EqualAngle": METRIC,
}

_EPS = 1e-18


@dataclass(frozen=True)
class Residual:
    """One constraint term; `variant` refines FixedLength and NonDegeneracy."""

    kind: str
    points: Tuple[str, ...]
    target: Optional[float] = None
    variant: str = ""
    circle: Optional[str] = None
    source: str = ""
    weight: float = 1.0

    @property
    def strictness(self) -> str:
        return KIND_CLASS[self.kind]

    @property
    def size(self) -> int:
        if self.kind in ("Parallel", "Midpoint"):
            return 2
        if self.kind == "NonDegeneracy" and self.variant == "between":
            return 2
        return 1

    def __str__(self):
        target = "" if self.target is None else f"={self.target:g}"
        variant = f"[{self.variant}]" if self.variant else ""
        return f"{self.kind}{variant}({''.join(self.points)}){target}"


@dataclass
class Variables:
    """Column layout of the free vector: unpinned point coordinates, one radius
    per circle, then the global scale."""

    order: Tuple[str, ...]
    circles: Tuple[str, ...] = ()
    pinned: Dict[str, np.ndarray] = field(default_factory=dict)
    columns: Dict[str, Tuple[int, int]] = field(default_factory=dict)
    radius_column: Dict[str, int] = field(default_factory=dict)
    scale_column: int = 0
    size: int = 0

    @classmethod
    def for_order(cls, order: Sequence[str], circles: Sequence[str] = (), pin: bool = True):
        layout = cls(tuple(order), tuple(circles))
        center = np.array(CANVAS_CENTER, dtype=float)
        if order and pin:
            layout.pinned[order[0]] = center
        if len(order) > 1 and pin:
            layout.pinned[order[1]] = center + np.array(PIN_OFFSET)
        n = 0
        for p in order:
            if p not in layout.pinned:
                layout.columns[p] = (n, n + 1)
                n += 2
        for c in circles:
            layout.radius_column[c] = n
            n += 1
        layout.scale_column = n
        layout.size = n + 1
        return layout

    def point(self, x: np.ndarray, p: str) -> np.ndarray:
        if p in self.pinned:
            return self.pinned[p]
        i, j = self.columns[p]
        return np.array((x[i], x[j]))

    def radius(self, x: np.ndarray, c: str) -> float:
        return float(x[self.radius_column[c]])

    def scale(self, x: np.ndarray) -> float:
        return float(x[self.scale_column])

    def coordinates(self, x: np.ndarray) -> Dict[str, Tuple[float, float]]:
        return {p: tuple(float(v) for v in self.point(x, p)) for p in self.order}

    def pack(self, coords, radii, scale) -> np.ndarray:
        x = np.zeros(self.size)
        for p, (i, j) in self.columns.items():
            x[i], x[j] = coords[p]
        for c, i in self.radius_column.items():
            x[i] = radii[c]
        x[self.scale_column] = scale
        return x


class _Rows:
    def __init__(self, variables: Variables, count: int):
        self.vars = variables
        self.values = np.zeros(count)
        self.jac = np.zeros((count, variables.size))

    def point(self, row, p, grad):
        cols = self.vars.columns.get(p)
        if cols is not None:
            self.jac[row, cols[0]] += grad[0]
            self.jac[row, cols[1]] += grad[1]

    def column(self, row, col, grad):
        self.jac[row, col] += grad


def _norm(v) -> float:
    return math.sqrt(float(v @ v) + _EPS)


def _cross(u, w) -> float:
    return float(u[0] * w[1] - u[1] * w[0])


def _cosine(a, c):
    """cos of the angle between a and c, with gradients in a and c"""
    na, nc = _norm(a), _norm(c)
    cos = float(a @ c) / (na * nc)
    da = c / (na * nc) - cos * a / (na * na)
    dc = a / (na * nc) - cos * c / (nc * nc)
    return cos, da, dc


def _shoelace(pts):
    """Signed polygon area and its gradient per vertex"""
    n = len(pts)
    area = 0.0
    grads = []
    for i in range(n):
        nxt, prv = pts[(i + 1) % n], pts[i - 1]
        area += pts[i][0] * nxt[1] - nxt[0] * pts[i][1]
        grads.append(0.5 * np.array((nxt[1] - prv[1], prv[0] - nxt[0])))
    return 0.5 * area, grads


def _measure(res: Residual, V: Variables, x):
    """Measured quantity of a FixedLength residual with point and radius gradients."""
    P = [V.point(x, p) for p in res.points]
    if res.variant == "segment":
        u = P[1] - P[0]
        L = _norm(u)
        return L, [(res.points[0], -u / L), (res.points[1], u / L)], []
    if res.variant == "radius":
        return V.radius(x, res.circle), [], [(res.circle, 1.0)]
    if res.variant == "diameter":
        return 2 * V.radius(x, res.circle), [], [(res.circle, 2.0)]
    if res.variant == "perimeter":
        total, grads = 0.0, []
        for i in range(len(P)):
            u = P[(i + 1) % len(P)] - P[i]
            L = _norm(u)
            total += L
            grads += [(res.points[i], -u / L), (res.points[(i + 1) % len(P)], u / L)]
        return total, grads, []
    if res.variant == "area":
        area, grads = _shoelace(P)
        sign = 1.0 if area >= 0 else -1.0
        return abs(area), [(p, sign * g) for p, g in zip(res.points, grads)], []
    if res.variant == "arc":
        o, a, b = P
        va, vb = a - o, b - o
        signed = math.atan2(_cross(va, vb), float(va @ vb))
        sign = 1.0 if signed >= 0 else -1.0
        da = sign * np.array((va[1], -va[0])) / float(va @ va + _EPS)
        db = sign * np.array((-vb[1], vb[0])) / float(vb @ vb + _EPS)
        theta = abs(signed)
        rho = V.radius(x, res.circle)
        grads = [(res.points[1], rho * da), (res.points[2], rho * db), (res.points[0], -rho * (da + db))]
        return rho * theta, grads, [(res.circle, theta)]
    raise ValueError(f"unknown length variant {res.variant!r}")


def evaluate(res: Residual, V: Variables, x: np.ndarray):
    """Residual components and their Jacobian rows over the free vector."""
    rows = _Rows(V, res.size)
    P = [V.point(x, p) for p in res.points]
    names = res.points
    D = CANVAS_DIAGONAL
    kind = res.kind

    if kind == "Collinear":
        a, b, c = P
        u, w = b - a, c - a
        L = _norm(u)
        cross = _cross(u, w)
        rows.values[0] = cross / (L * D)
        du = np.array((w[1], -w[0])) / (L * D) - cross * u / (L ** 3 * D)
        dw = np.array((-u[1], u[0])) / (L * D)
        rows.point(0, names[1], du)
        rows.point(0, names[2], dw)
        rows.point(0, names[0], -du - dw)

    elif kind == "OnCircle":
        p, o = P
        v = p - o
        L = _norm(v)
        rows.values[0] = (L - V.radius(x, res.circle)) / D
        rows.point(0, names[0], v / (L * D))
        rows.point(0, names[1], -v / (L * D))
        rows.column(0, V.radius_column[res.circle], -1.0 / D)

    elif kind in ("Perpendicular", "Tangent", "FixedAngle"):
        if kind == "Perpendicular":
            a, b, c, d = P
            u, w = b - a, d - c
            cos, du, dw = _cosine(u, w)
            rows.point(0, names[1], du)
            rows.point(0, names[0], -du)
            rows.point(0, names[3], dw)
            rows.point(0, names[2], -dw)
            rows.values[0] = cos
        else:
            a, v, c = P
            cos, da, dc = _cosine(a - v, c - v)
            rows.point(0, names[0], da)
            rows.point(0, names[2], dc)
            rows.point(0, names[1], -da - dc)
            target = 90.0 if kind == "Tangent" else res.target
            rows.values[0] = cos - math.cos(math.radians(target))

    elif kind == "EqualAngle":
        a1, v1, c1, a2, v2, c2 = P
        cos1, da1, dc1 = _cosine(a1 - v1, c1 - v1)
        cos2, da2, dc2 = _cosine(a2 - v2, c2 - v2)
        rows.values[0] = cos1 - cos2
        rows.point(0, names[0], da1)
        rows.point(0, names[2], dc1)
        rows.point(0, names[1], -da1 - dc1)
        rows.point(0, names[3], -da2)
        rows.point(0, names[5], -dc2)
        rows.point(0, names[4], da2 + dc2)

    elif kind == "Parallel":
        a, b, c, d = P
        u, w = b - a, d - c
        nu, nw = _norm(u), _norm(w)
        eu, ew = u / nu, w / nw
        rows.values[:] = eu - ew
        ju = (np.eye(2) - np.outer(eu, eu)) / nu
        jw = (np.eye(2) - np.outer(ew, ew)) / nw
        for k in range(2):
            rows.point(k, names[1], ju[k])
            rows.point(k, names[0], -ju[k])
            rows.point(k, names[3], -jw[k])
            rows.point(k, names[2], jw[k])

    elif kind == "Midpoint":
        m, a, b = P
        rows.values[:] = (m - (a + b) / 2) / D
        for k in range(2):
            unit = np.zeros(2)
            unit[k] = 1.0
            rows.point(k, names[0], unit / D)
            rows.point(k, names[1], -unit / (2 * D))
            rows.point(k, names[2], -unit / (2 * D))

    elif kind == "EqualLength":
        a, b, c, d = P
        u, w = b - a, d - c
        l1, l2 = _norm(u), _norm(w)
        total = l1 + l2
        rows.values[0] = 2 * (l1 - l2) / total
        g1 = 4 * l2 / (total * total)
        g2 = -4 * l1 / (total * total)
        rows.point(0, names[1], g1 * u / l1)
        rows.point(0, names[0], -g1 * u / l1)
        rows.point(0, names[3], g2 * w / l2)
        rows.point(0, names[2], -g2 * w / l2)

    elif kind == "FixedLength":
        measured, point_grads, radius_grads = _measure(res, V, x)
        power = 2 if res.variant == "area" else 1
        s = V.scale(x)
        denom = (s ** power) * res.target
        rows.values[0] = measured / denom - 1
        for p, g in point_grads:
            rows.point(0, p, g / denom)
        for c, g in radius_grads:
            rows.column(0, V.radius_column[c], g / denom)
        rows.column(0, V.scale_column, -power * measured / (denom * s))

    elif kind == "NonDegeneracy":
        _nondegeneracy(res, rows, P)

    else:
        raise ValueError(f"unknown residual kind {kind!r}")
    return rows.values, rows.jac


def _nondegeneracy(res: Residual, rows: _Rows, P):
    names = res.points
    if res.variant == "separation":
        v = P[1] - P[0]
        d = _norm(v)
        gap = MIN_SEPARATION - d
        if gap > 0:
            rows.values[0] = gap / CANVAS_DIAGONAL
            rows.point(0, names[1], -v / (d * CANVAS_DIAGONAL))
            rows.point(0, names[0], v / (d * CANVAS_DIAGONAL))
    elif res.variant == "area":
        area, grads = _shoelace(P)
        gap = MIN_AREA - abs(area)
        if gap > 0:
            sign = 1.0 if area >= 0 else -1.0
            rows.values[0] = gap / CANVAS_AREA
            for p, g in zip(names, grads):
                rows.point(0, p, -sign * g / CANVAS_AREA)
    elif res.variant == "between":
        p, m, q = P
        mv, qv = m - p, q - p
        nq = float(qv @ qv) + _EPS
        t = float(mv @ qv) / nq
        dm = qv / nq
        dq = mv / nq - 2 * float(mv @ qv) * qv / (nq * nq)
        for row, gap, sign in ((0, BETWEEN_MARGIN - t, -1.0), (1, t - (1 - BETWEEN_MARGIN), 1.0)):
            if gap > 0:
                rows.values[row] = gap
                rows.point(row, names[1], sign * dm)
                rows.point(row, names[2], sign * dq)
                rows.point(row, names[0], -sign * (dm + dq))
    else:
        raise ValueError(f"unknown non-degeneracy variant {res.variant!r}")


def stack(residuals: Sequence[Residual], V: Variables, x: np.ndarray):
    """All residual components (weighted) and the full Jacobian."""
    values, jacs = [], []
    for res in residuals:
        r, j = evaluate(res, V, x)
        w = math.sqrt(res.weight)
        values.append(w * r)
        jacs.append(w * j)
    if not values:
        return np.zeros(0), np.zeros((0, V.size))
    return np.concatenate(values), np.vstack(jacs)


def magnitude(res: Residual, V: Variables, x: np.ndarray) -> float:
    values, _ = evaluate(res, V, x)
    return float(np.max(np.abs(values)))
