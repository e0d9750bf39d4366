"""
Kivy-free helpers for the workbench: viewport mapping, hit testing and the
metric listing shown in the point popup
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ..cdl.printer import human_value
from ..engine.symbols import QuantitySymbol
from ..layout.residuals import CANVAS_HEIGHT, CANVAS_WIDTH

HIT_RADIUS = 18.0
BOX_PADDING = 12.0


@dataclass(frozen=True)
class Viewport:
    """Uniform map from the layout canvas into a widget box (y up, like Kivy)."""

    origin: Tuple[float, float]
    unit: float

    def to_screen(self, x: float, y: float) -> Tuple[float, float]:
        return self.origin[0] + x * self.unit, self.origin[1] + y * self.unit

    def to_canvas(self, sx: float, sy: float) -> Tuple[float, float]:
        return (sx - self.origin[0]) / self.unit, (sy - self.origin[1]) / self.unit


def fit_viewport(pos: Sequence[float], size: Sequence[float], padding: float = BOX_PADDING) -> Viewport:
    width = max(1.0, size[0] - 2 * padding)
    height = max(1.0, size[1] - 2 * padding)
    unit = min(width / CANVAS_WIDTH, height / CANVAS_HEIGHT)
    ox = pos[0] + (size[0] - unit * CANVAS_WIDTH) / 2
    oy = pos[1] + (size[1] - unit * CANVAS_HEIGHT) / 2
    return Viewport((ox, oy), unit)


def screen_points(coordinates: Mapping[str, Tuple[float, float]], viewport: Viewport) -> Dict[str, Tuple[float, float]]:
    return {p: viewport.to_screen(*xy) for p, xy in coordinates.items()}


def nearest_point(
    points: Mapping[str, Tuple[float, float]], touch: Tuple[float, float], radius: float = HIT_RADIUS
) -> Optional[str]:
    """Closest point within radius; ties go to the earlier name."""
    best, best_d = None, radius
    for name in sorted(points):
        x, y = points[name]
        d = math.hypot(x - touch[0], y - touch[1])
        if d <= best_d and (best is None or d < best_d):
            best, best_d = name, d
    return best


def metrics_touching(point: str, determined: Mapping[QuantitySymbol, object]) -> List[str]:
    """Determined quantities whose arguments mention point."""
    return [f"{symbol} = {human_value(value)}" for symbol, value in sorted(determined.items()) if point in symbol.args]


def point_details(point: str, coordinates: Mapping[str, Tuple[float, float]], determined: Mapping) -> str:
    x, y = coordinates[point]
    lines = [f"Point {point} at ({x:.3f}, {y:.3f})"]
    metrics = metrics_touching(point, determined)
    lines.extend(metrics or ["No determined metric mentions this point"])
    return "\n".join(lines)
