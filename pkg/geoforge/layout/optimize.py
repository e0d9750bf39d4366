"""
Multi-start damped least squares over a constraint system, and the
two-class acceptance check
"""

from __future__ import annotations

import math
import statistics
import warnings
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple, Union

import numpy as np
from scipy.linalg import LinAlgError, LinAlgWarning, solve

from ..errors import ConfigError, Rejected
from ..log import debug_log
from .compile import ConstraintSystem
from .residuals import (
    CANVAS_HEIGHT,
    CANVAS_WIDTH,
    INCIDENCE,
    METRIC,
    Residual,
    Variables,
    magnitude,
    stack,
)

THRESHOLD_FAIL = "ThresholdFail"
NUMERICAL_FAILURE = "NumericalFailure"

MAX_DAMPING = 1e12
MIN_DAMPING = 1e-12
STALL_RATIO = 1e-10


@dataclass(frozen=True)
class LayoutConfig:
    restarts: int = 20
    max_iterations: int = 500
    tau_incidence: float = 1e-3
    tau_metric: float = 1e-2
    initial_damping: float = 1e-3
    damping_up: float = 2.0
    damping_down: float = 0.5
    tolerance: float = 1e-20
    margin: float = 0.35

    def __post_init__(self):
        if self.restarts < 1 or self.max_iterations < 1:
            raise ConfigError("layout restarts and max_iterations must be at least 1")
        if not 0 < self.tau_incidence < self.tau_metric:
            raise ConfigError("layout thresholds must satisfy 0 < tau_incidence < tau_metric")
        if self.damping_up <= 1 or not 0 < self.damping_down < 1:
            raise ConfigError("damping factors must grow above 1 and shrink below 1")
        if not 0 <= self.margin < min(CANVAS_WIDTH, CANVAS_HEIGHT) / 2:
            raise ConfigError(f"layout margin {self.margin} leaves no drawing area")


@dataclass(frozen=True)
class LayoutSolution:
    coordinates: Dict[str, Tuple[float, float]]
    radii: Dict[str, float]
    scale: float
    report: Tuple[Tuple[Residual, float], ...]
    total_loss: float
    restarts_used: int
    system: Optional[ConstraintSystem] = field(default=None, compare=False, repr=False)

    def to_json(self) -> dict:
        return {
            "coordinates": {p: list(xy) for p, xy in self.coordinates.items()},
            "radii": dict(self.radii),
            "scale": self.scale,
            "total_loss": self.total_loss,
            "restarts_used": self.restarts_used,
            "residuals": [
                {"residual": str(res), "class": res.strictness, "source": res.source, "value": value}
                for res, value in self.report
            ],
        }


@dataclass(frozen=True)
class ThresholdReport:
    """Accept iff every class stays under its own threshold."""

    accepted: bool
    worst: Dict[str, float]
    failures: Tuple[Tuple[str, str, float], ...] = ()

    def __bool__(self):
        return self.accepted

    def summary(self) -> str:
        parts = [f"{cls} max {value:.3g}" for cls, value in sorted(self.worst.items())]
        return ", ".join(parts)


def check_thresholds(solution: LayoutSolution, config: Optional[LayoutConfig] = None) -> ThresholdReport:
    config = config or LayoutConfig()
    limits = {INCIDENCE: config.tau_incidence, METRIC: config.tau_metric}
    worst = {INCIDENCE: 0.0, METRIC: 0.0}
    failures = []
    for res, value in solution.report:
        cls = res.strictness
        worst[cls] = max(worst[cls], value)
        if not value <= limits[cls]:
            failures.append((cls, str(res), value))
    return ThresholdReport(not failures, worst, tuple(failures))


def levenberg_marquardt(fun, x0: np.ndarray, config: LayoutConfig):
    """Minimize |r(x)|^2; damping doubles on a rejected step and halves on an
    accepted one. Returns (x, cost, iterations)."""
    x = np.array(x0, dtype=float)
    r, J = fun(x)
    cost = float(r @ r)
    if not math.isfinite(cost):
        return x, cost, 0
    lam = config.initial_damping
    iterations = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        for iterations in range(1, config.max_iterations + 1):
            if cost <= config.tolerance:
                break
            A = J.T @ J
            g = J.T @ r
            if not (np.all(np.isfinite(A)) and np.all(np.isfinite(g))):
                return x, float("nan"), iterations
            damping = np.diag(np.diag(A) + 1e-9)
            accepted = False
            while lam <= MAX_DAMPING:
                try:
                    step = solve(A + lam * damping, -g, assume_a="pos", check_finite=False)
                except (LinAlgError, ValueError):
                    lam *= config.damping_up
                    continue
                r_new, J_new = fun(x + step)
                cost_new = float(r_new @ r_new)
                if math.isfinite(cost_new) and cost_new < cost:
                    accepted = True
                    break
                lam *= config.damping_up
            if not accepted:
                break
            gain = cost - cost_new
            x, r, J, cost = x + step, r_new, J_new, cost_new
            lam = max(lam * config.damping_down, MIN_DAMPING)
            if gain <= STALL_RATIO * cost:
                break
    return x, cost, iterations


def _initial_guess(system: ConstraintSystem, V: Variables, rng) -> np.ndarray:
    coords = {}
    for p in system.points:
        if p in V.pinned:
            coords[p] = tuple(V.pinned[p])
        else:
            coords[p] = (rng.uniform(0.0, CANVAS_WIDTH), rng.uniform(0.0, CANVAS_HEIGHT))
    radii = {}
    for c in system.circles:
        spokes = [
            math.dist(coords[res.points[0]], coords[res.points[1]])
            for res in system.residuals
            if res.kind == "OnCircle" and res.circle == c
        ]
        radii[c] = statistics.fmean(spokes) if spokes else rng.uniform(0.5, 1.5)
    ratios = [
        math.dist(coords[res.points[0]], coords[res.points[1]]) / res.target
        for res in system.residuals
        if res.kind == "FixedLength" and res.variant == "segment"
    ]
    scale = statistics.median(ratios) if ratios else 1.0
    return V.pack(coords, radii, max(scale, 1e-3))


def _report(system: ConstraintSystem, V: Variables, x) -> Tuple[Tuple[Residual, float], ...]:
    return tuple((res, magnitude(res, V, x)) for res in system.residuals)


def _solution(system, V, x, cost, restarts) -> LayoutSolution:
    return LayoutSolution(
        coordinates=V.coordinates(x),
        radii={c: V.radius(x, c) for c in system.circles},
        scale=V.scale(x),
        report=_report(system, V, x),
        total_loss=cost,
        restarts_used=restarts,
        system=system,
    )


def fit_to_canvas(solution: LayoutSolution, margin: float = LayoutConfig.margin) -> LayoutSolution:
    """Similarity transform placing the figure, circles included, centered
    inside the canvas with a margin; the residual report is recomputed."""
    system = solution.system
    xs, ys = [], []
    for x, y in solution.coordinates.values():
        xs.append(x)
        ys.append(y)
    for c, rho in solution.radii.items():
        if c in solution.coordinates:
            cx, cy = solution.coordinates[c]
            xs += [cx - abs(rho), cx + abs(rho)]
            ys += [cy - abs(rho), cy + abs(rho)]
    if not xs:
        return solution
    width, height = max(xs) - min(xs), max(ys) - min(ys)
    limits = []
    if width > 1e-12:
        limits.append((CANVAS_WIDTH - 2 * margin) / width)
    if height > 1e-12:
        limits.append((CANVAS_HEIGHT - 2 * margin) / height)
    k = min(limits) if limits else 1.0
    mid = ((max(xs) + min(xs)) / 2, (max(ys) + min(ys)) / 2)
    center = (CANVAS_WIDTH / 2, CANVAS_HEIGHT / 2)
    coords = {
        p: (center[0] + k * (x - mid[0]), center[1] + k * (y - mid[1]))
        for p, (x, y) in solution.coordinates.items()
    }
    radii = {c: k * abs(rho) for c, rho in solution.radii.items()}
    scale = k * solution.scale
    V = Variables.for_order(system.points, system.circles, pin=False)
    x = V.pack(coords, radii, scale)
    report = _report(system, V, x)
    loss = float(sum(value * value for _, value in report))
    return LayoutSolution(coords, radii, scale, report, loss, solution.restarts_used, system)


def optimize(system: ConstraintSystem, rng, config: Optional[LayoutConfig] = None) -> Union[LayoutSolution, Rejected]:
    """Keep the lowest-loss restart that passes both class thresholds after
    being fitted into the canvas. A restart that reaches the solver tolerance
    is exact and ends the search."""
    config = config or LayoutConfig()
    V = Variables.for_order(system.points, system.circles)

    def fun(x):
        return stack(system.residuals, V, x)

    best: Optional[LayoutSolution] = None
    best_loss = math.inf
    best_report = None
    finite = False
    for restart in range(1, config.restarts + 1):
        x0 = _initial_guess(system, V, rng)
        x, cost, iterations = levenberg_marquardt(fun, x0, config)
        if not math.isfinite(cost):
            debug_log(f"Layout restart {restart}: non-finite loss after {iterations} iterations", "DEBUG")
            continue
        finite = True
        solution = _solution(system, V, x, cost, restart)
        verdict = check_thresholds(solution, config)
        if verdict:
            fitted = fit_to_canvas(solution, config.margin)
            verdict = check_thresholds(fitted, config)
            if verdict and (best is None or fitted.total_loss < best.total_loss):
                best = fitted
                if cost <= config.tolerance:
                    break
        if cost < best_loss:
            best_loss, best_report = cost, verdict

    if best is not None:
        debug_log(f"Layout accepted from restart {best.restarts_used} (loss {best.total_loss:.3g})", "DEBUG")
        return best
    if not finite:
        debug_log("Layout failed: every restart diverged", "WARN")
        return Rejected(NUMERICAL_FAILURE, "non-finite loss on every restart")
    detail = best_report.summary() if best_report is not None else ""
    debug_log(f"Layout rejected after {config.restarts} restarts: best loss {best_loss:.3g}", "DEBUG")
    return Rejected(THRESHOLD_FAIL, detail, best_loss)
