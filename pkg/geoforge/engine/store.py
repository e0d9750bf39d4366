"""
Deduction state: facts with ids, canonical relations, equations and
determined quantity values, plus the derivation steps that produced them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from ..cdl.facts import FormalProblem, RelationFact, is_finite
from ..errors import InconsistentFacts
from .equations import CONFLICT_TOL, LINEAR, Equation, close, snap, solve_single
from .figure import Figure, min_rotation
from .symbols import Determination, QuantitySymbol


@dataclass(frozen=True)
class Binding:
    """One instantiation of a theorem (or algebra rule) with its conclusions."""

    theorem: str
    key: tuple
    premises: Tuple[int, ...]
    conclusions: tuple


@dataclass(frozen=True)
class DerivationStep:
    index: int
    theorem: str
    premises: Tuple[int, ...]
    conclusions: tuple
    binding: tuple = ()


@dataclass(frozen=True)
class StoredFact:
    id: int
    kind: str
    item: object
    step: Optional[int] = None


def _pair(points):
    return tuple(sorted(points))


def relation_key(rel: RelationFact):
    """Canonical identity of a relation, so restatements deduplicate."""
    name, args = rel.predicate, rel.args
    if name == "ParallelBetweenLine":
        (a, b), (c, d) = args
        if a > b:
            a, b, c, d = b, a, d, c
        return name, tuple(sorted(((a, b), (c, d))))
    if name == "PerpendicularBetweenLine":
        return name, tuple(sorted((_pair(args[0]), _pair(args[1]))))
    if name == "IsMidpointOfLine":
        return name, (args[0], _pair(args[1]))
    if name == "IsBisectorOfAngle":
        return name, (args[0], min(args[1], tuple(reversed(args[1]))))
    if name in ("IsAltitudeOfTriangle", "IsMedianOfTriangle"):
        tri = args[1]
        return name, (args[0], tri[0], _pair(tri[1:]))
    if name == "IsoscelesTriangle":
        tri = args[0]
        return name, (tri[0], _pair(tri[1:]))
    if name == "EquilateralTriangle":
        return name, _pair(args[0])
    if name == "RightTriangle":
        a, b, c = args[0]
        return name, (b, _pair((a, c)))
    if name in ("Parallelogram", "Rectangle", "Square"):
        return name, min_rotation(args[0])
    if name == "IsDiameterOfCircle":
        return name, (_pair(args[0]), args[1])
    if name in ("SimilarBetweenTriangle", "CongruentBetweenTriangle"):
        first, second = args
        orders = ((0, 1, 2), (1, 2, 0), (2, 0, 1), (0, 2, 1), (2, 1, 0), (1, 0, 2))
        pairs = []
        for order in orders:
            x = tuple(first[i] for i in order)
            y = tuple(second[i] for i in order)
            pairs.extend([(x, y), (y, x)])
        return name, min(pairs)
    return name, args


def _in_range(symbol: QuantitySymbol, value) -> bool:
    number = float(value)
    if symbol.kind == "MeasureOfAngle":
        return 0 < number < 180
    return number > 0


class FactStore:
    def __init__(self, problem: FormalProblem):
        self.problem = problem
        self.figure = Figure(problem.constructions)
        self.facts: List[StoredFact] = []
        self.relations: Dict[tuple, int] = {}
        self.equations: Dict[Equation, int] = {}
        self.determined: Dict[QuantitySymbol, object] = {}
        self.value_fact: Dict[QuantitySymbol, int] = {}
        self.applied = set()
        self.steps: List[DerivationStep] = []
        self.generation = 0
        self._by_symbol: Dict[QuantitySymbol, List[Equation]] = {}

        for fact in problem.constructions:
            self._record("construction", fact)
        for rel in problem.relation_facts:
            self.add_relation(rel)

        self.statement_values: Dict[QuantitySymbol, object] = {}
        self.mentioned: List[QuantitySymbol] = []
        for fact in problem.metric_facts:
            symbol = self.symbol(fact.quantity, fact.args)
            self.statement_values.setdefault(symbol, fact.value)
            self._mention(symbol)
            self.determine(symbol, fact.value)
        self.goal_symbol: Optional[QuantitySymbol] = None
        if problem.goal is not None:
            self.goal_symbol = self.symbol(problem.goal.quantity, problem.goal.args)
            self._mention(self.goal_symbol)

    def symbol(self, quantity, args) -> QuantitySymbol:
        symbol = self.figure.symbol(quantity, args)
        if symbol is None:
            raise InconsistentFacts(f"{quantity}({''.join(args)}) names a degenerate quantity")
        return symbol

    def _mention(self, symbol):
        if symbol not in self.mentioned:
            self.mentioned.append(symbol)

    def _record(self, kind, item, step=None) -> int:
        fid = len(self.facts)
        self.facts.append(StoredFact(fid, kind, item, step))
        self.generation += 1
        return fid

    # lookups

    def relations_of(self, predicate) -> List[Tuple[int, RelationFact]]:
        return [
            (fid, self.facts[fid].item)
            for key, fid in sorted(self.relations.items(), key=lambda kv: kv[1])
            if key[0] == predicate
        ]

    def has_relation(self, rel: RelationFact) -> bool:
        return relation_key(rel) in self.relations

    def value(self, symbol):
        if symbol is None:
            return None
        return self.determined.get(symbol)

    def value_premises(self, *symbols) -> Tuple[int, ...]:
        return tuple(self.value_fact[s] for s in symbols if s in self.value_fact)

    def shapes(self, size=None) -> List[Tuple[Tuple[str, ...], Tuple[int, ...]]]:
        """Polygons of the figure plus polygons named by perimeter or area quantities."""
        found = {}
        for poly in self.figure.polygons:
            found.setdefault(min_rotation(poly.vertices), (poly.vertices, tuple(sorted(poly.sources))))
        for symbol in self.mentioned:
            if symbol.kind in ("PerimeterOf", "AreaOf"):
                found.setdefault(min_rotation(symbol.args), (symbol.args, ()))
        return [v for _, v in sorted(found.items()) if size is None or len(v[0]) == size]

    # growth

    def add_relation(self, rel: RelationFact, step=None) -> Optional[int]:
        key = relation_key(rel)
        if key in self.relations:
            return None
        fid = self._record("relation", rel, step)
        self.relations[key] = fid
        return fid

    def add_equation(self, eq: Optional[Equation], step=None) -> Optional[int]:
        if eq is None or eq in self.equations:
            return None
        fid = self._record("equation", eq, step)
        self.equations[eq] = fid
        for symbol in eq.symbols:
            self._by_symbol.setdefault(symbol, []).append(eq)
        if eq.shape == LINEAR and len(eq.terms) == 1:
            self.determine(eq.symbols[0], solve_single(eq, eq.symbols[0], {}), step)
        else:
            self._check(eq)
        return fid

    def determine(self, symbol: QuantitySymbol, value, step=None) -> Optional[int]:
        if not is_finite(value) or (isinstance(value, float) and math.isnan(value)):
            raise InconsistentFacts(f"{symbol} has a non-finite value", symbol, (value,))
        value = snap(value)
        if not _in_range(symbol, value):
            raise InconsistentFacts(f"{symbol} = {float(value):g} is impossible", symbol, (value,))
        if symbol in self.determined:
            old = self.determined[symbol]
            if not close(value, old, CONFLICT_TOL):
                raise InconsistentFacts(
                    f"{symbol} determined as both {float(old):g} and {float(value):g}", symbol, (old, value)
                )
            return None
        self.determined[symbol] = value
        fid = self._record("value", Determination(symbol, value), step)
        self.value_fact[symbol] = fid
        for eq in self._by_symbol.get(symbol, ()):
            self._check(eq)
        return fid

    def _check(self, eq: Equation):
        if eq.unknowns(self.determined):
            return
        if not eq.satisfied(self.determined, CONFLICT_TOL):
            raise InconsistentFacts(
                f"determined values break an equation (gap {eq.residual(self.determined):g})",
                values=tuple(self.determined[s] for s in eq.symbols),
            )

    def _add(self, item, step):
        if isinstance(item, RelationFact):
            return self.add_relation(item, step)
        if isinstance(item, Equation):
            return self.add_equation(item, step)
        if isinstance(item, Determination):
            return self.determine(item.symbol, item.value, step)
        raise TypeError(f"cannot store {item!r}")

    def apply(self, binding: Binding) -> int:
        """Add a binding's conclusions; record a step when anything is new."""
        self.applied.add((binding.theorem, binding.key))
        index = len(self.steps)
        before = len(self.facts)
        for item in binding.conclusions:
            self._add(item, index)
        new = self.facts[before:]
        if new:
            self.steps.append(
                DerivationStep(index, binding.theorem, binding.premises, tuple(f.item for f in new), binding.key)
            )
        return len(new)

    def producer(self, fid) -> Optional[DerivationStep]:
        step = self.facts[fid].step
        return None if step is None else self.steps[step]
