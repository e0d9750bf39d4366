"""
Facts and problems of the Conditional Declaration Language
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Tuple, Union

from ..errors import CDLSyntaxError

Value = Union[Fraction, float]
Points = Tuple[str, ...]

POINT_RE = re.compile(r"[A-Z][0-9]*")
_POINTS_RE = re.compile(r"(?:[A-Z][0-9]*)+")


def split_points(token: str) -> Points:
    """Split a point run like 'AB' or 'A1B2C' into labels."""
    if not _POINTS_RE.fullmatch(token or ""):
        raise CDLSyntaxError(f"bad point list {token!r}")
    return tuple(POINT_RE.findall(token))


def join_points(points) -> str:
    return "".join(points)


def as_value(raw) -> Value:
    """Exact rationals for ints and Fractions; floats stay floats."""
    if isinstance(raw, bool):
        raise TypeError("booleans are not metric values")
    if isinstance(raw, Fraction):
        return raw
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, float):
        return raw
    raise TypeError(f"unsupported value {raw!r}")


def is_finite(value: Value) -> bool:
    return not isinstance(value, float) or math.isfinite(value)


@dataclass(frozen=True)
class ConstructionFact:
    """Shape (closed chain of directed edges), Collinear (ordered points) or
    Cocircular (center, then points counter-clockwise)."""

    kind: str
    args: Tuple[Points, ...]

    @property
    def points(self) -> Points:
        seen = []
        for arg in self.args:
            for p in arg:
                if p not in seen:
                    seen.append(p)
        return tuple(seen)

    @property
    def vertices(self) -> Points:
        """Polygon vertices of a Shape, in chain order."""
        if self.kind != "Shape":
            return ()
        return tuple(edge[0] for edge in self.args)

    @property
    def center(self) -> Optional[str]:
        return self.args[0][0] if self.kind == "Cocircular" else None


@dataclass(frozen=True)
class RelationFact:
    predicate: str
    args: Tuple[Points, ...]

    @property
    def points(self) -> Points:
        return tuple(dict.fromkeys(p for arg in self.args for p in arg))


@dataclass(frozen=True)
class Goal:
    quantity: str
    args: Points

    @property
    def points(self) -> Points:
        return tuple(dict.fromkeys(self.args))


@dataclass(frozen=True)
class MetricFact:
    quantity: str
    args: Points
    value: Value

    @property
    def points(self) -> Points:
        return tuple(dict.fromkeys(self.args))

    @property
    def head(self) -> Goal:
        return Goal(self.quantity, self.args)


Fact = Union[RelationFact, MetricFact]


@dataclass(frozen=True)
class FormalProblem:
    constructions: Tuple[ConstructionFact, ...] = ()
    text_facts: Tuple[Fact, ...] = ()
    image_facts: Tuple[Fact, ...] = ()
    goal: Optional[Goal] = None
    id: str = field(default="", compare=True)

    @property
    def points(self) -> Points:
        """Point universe declared by the constructions."""
        seen = {}
        for fact in self.constructions:
            for p in fact.points:
                seen.setdefault(p, None)
        return tuple(seen)

    @property
    def statement_facts(self) -> Tuple[Fact, ...]:
        return self.text_facts + self.image_facts

    @property
    def metric_facts(self) -> Tuple[MetricFact, ...]:
        return tuple(f for f in self.statement_facts if isinstance(f, MetricFact))

    @property
    def relation_facts(self) -> Tuple[RelationFact, ...]:
        return tuple(f for f in self.statement_facts if isinstance(f, RelationFact))

    def structural_key(self):
        """Everything but the id; two problems with equal keys are the same problem."""
        return (self.constructions, self.text_facts, self.image_facts, self.goal)

    def with_statement(self, text_facts, image_facts=(), goal=None, id=None) -> "FormalProblem":
        return replace(
            self,
            text_facts=tuple(text_facts),
            image_facts=tuple(image_facts),
            goal=goal if goal is not None else self.goal,
            id=self.id if id is None else id,
        )
