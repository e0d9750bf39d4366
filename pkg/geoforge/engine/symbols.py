"""
Quantity symbols, determinations and metric sets
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, Mapping, Tuple

from ..cdl.facts import Goal, MetricFact, Value

Points = Tuple[str, ...]


@dataclass(frozen=True, order=True)
class QuantitySymbol:
    """A canonical metric quantity; two names for one quantity share a symbol."""

    kind: str
    args: Points

    def __str__(self):
        return f"{self.kind}({''.join(self.args)})"

    def as_goal(self) -> Goal:
        return Goal(self.kind, self.args)

    def as_fact(self, value: Value) -> MetricFact:
        return MetricFact(self.kind, self.args, value)


@dataclass(frozen=True)
class Determination:
    symbol: QuantitySymbol
    value: Value

    def __str__(self):
        return f"{self.symbol} = {float(self.value):g}"


class MetricSet(Mapping):
    """Immutable symbol -> value map iterated in symbol order."""

    def __init__(self, values: Mapping[QuantitySymbol, Value] = ()):
        self._values: Dict[QuantitySymbol, Value] = dict(sorted(dict(values).items()))

    def __getitem__(self, symbol):
        return self._values[symbol]

    def __iter__(self) -> Iterator[QuantitySymbol]:
        return iter(self._values)

    def __len__(self):
        return len(self._values)

    def __repr__(self):
        inner = ", ".join(f"{s}={float(v):g}" for s, v in self._values.items())
        return f"MetricSet({inner})"

    def __eq__(self, other):
        if isinstance(other, MetricSet):
            return self._values == other._values
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self._values.items()))

    def symbols(self) -> Tuple[QuantitySymbol, ...]:
        return tuple(self._values)

    def issubset(self, other: "MetricSet") -> bool:
        return all(s in other for s in self._values)

    def without(self, symbols) -> "MetricSet":
        drop = set(symbols)
        return MetricSet({s: v for s, v in self._values.items() if s not in drop})

    def as_facts(self) -> Tuple[MetricFact, ...]:
        return tuple(s.as_fact(v) for s, v in self._values.items())
