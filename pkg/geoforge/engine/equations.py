"""
Equations over quantity symbols and their closed-form single-unknown solves

Three shapes are supported:
  linear          sum(c * s) + constant = 0
  product-ratio   prod(s ** e) = constant      (integer exponents)
  sum-of-squares  sum(c * s**2) + constant = 0
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Tuple

from ..errors import InconsistentFacts
from .symbols import QuantitySymbol

LINEAR = "linear"
PRODUCT = "product-ratio"
SQUARES = "sum-of-squares"
SHAPES = (LINEAR, PRODUCT, SQUARES)

CONFLICT_TOL = 1e-6
SATISFY_TOL = 1e-9
SNAP_TOL = 1e-12
SNAP_DENOMINATOR = 1000


def snap(value):
    """Turn float noise around a small rational back into that rational."""
    if isinstance(value, Fraction):
        return value
    if not math.isfinite(value):
        return value
    approx = Fraction(value).limit_denominator(SNAP_DENOMINATOR)
    if abs(float(approx) - value) <= SNAP_TOL * max(1.0, abs(value)):
        return approx
    return value


def exact_sqrt(value):
    if isinstance(value, Fraction) and value >= 0:
        n, d = math.isqrt(value.numerator), math.isqrt(value.denominator)
        if n * n == value.numerator and d * d == value.denominator:
            return Fraction(n, d)
    return snap(math.sqrt(value))


def _power(value, exponent):
    if isinstance(value, Fraction):
        return value ** exponent
    return float(value) ** exponent


def close(a, b, tol=CONFLICT_TOL) -> bool:
    return abs(float(a) - float(b)) <= tol * max(1.0, abs(float(b)))


@dataclass(frozen=True)
class Equation:
    shape: str
    terms: Tuple[Tuple[QuantitySymbol, object], ...]
    constant: object = Fraction(0)

    @property
    def symbols(self) -> Tuple[QuantitySymbol, ...]:
        return tuple(s for s, _ in self.terms)

    def coefficient(self, symbol):
        for s, c in self.terms:
            if s == symbol:
                return c
        return 0

    def unknowns(self, known: Mapping) -> Tuple[QuantitySymbol, ...]:
        return tuple(s for s in self.symbols if s not in known)

    def residual(self, values: Mapping) -> float:
        """Signed gap of the equation under fully known values."""
        if self.shape == LINEAR:
            return float(sum(c * values[s] for s, c in self.terms) + self.constant)
        if self.shape == SQUARES:
            return float(sum(c * values[s] * values[s] for s, c in self.terms) + self.constant)
        product = 1.0
        for s, e in self.terms:
            product *= float(values[s]) ** e
        return product - float(self.constant)

    def scale(self, values: Mapping) -> float:
        if self.shape == PRODUCT:
            return abs(float(self.constant))
        if self.shape == SQUARES:
            parts = [abs(float(c * values[s] * values[s])) for s, c in self.terms]
        else:
            parts = [abs(float(c * values[s])) for s, c in self.terms]
        return max(parts + [abs(float(self.constant))])

    def satisfied(self, values: Mapping, tol=SATISFY_TOL) -> bool:
        return abs(self.residual(values)) <= tol * max(1.0, self.scale(values))


def _exact(value):
    return Fraction(value) if isinstance(value, int) else value


def _merge(pairs: Iterable[Tuple[Optional[QuantitySymbol], object]]) -> Dict[QuantitySymbol, object]:
    merged: Dict[QuantitySymbol, object] = {}
    for symbol, coef in pairs:
        if symbol is None:
            raise ValueError("degenerate quantity in equation")
        merged[symbol] = merged.get(symbol, Fraction(0)) + _exact(coef)
    return {s: c for s, c in sorted(merged.items()) if c != 0}


def _scaled(shape, pairs, constant):
    merged = _merge(pairs)
    if not merged:
        return None
    lead = next(iter(merged.values()))
    terms = tuple((s, snap(c / lead)) for s, c in merged.items())
    return Equation(shape, terms, snap(_exact(constant) / lead))


def linear(pairs, constant=0) -> Optional[Equation]:
    """sum(c * s) + constant = 0, scaled so the first coefficient is 1."""
    return _scaled(LINEAR, pairs, constant)


def squares(pairs, constant=0) -> Optional[Equation]:
    return _scaled(SQUARES, pairs, constant)


def product(pairs, constant=1) -> Optional[Equation]:
    """prod(s ** e) = constant, flipped so the first exponent is positive."""
    merged = {s: int(e) for s, e in _merge(pairs).items()}
    if not merged:
        return None
    const = _exact(constant)
    if next(iter(merged.values())) < 0:
        merged = {s: -e for s, e in merged.items()}
        const = 1 / const
    return Equation(PRODUCT, tuple(merged.items()), snap(const))


def equal(a, b) -> Optional[Equation]:
    """a = b."""
    if a == b:
        return None
    return linear([(a, 1), (b, -1)])


def fixed(symbol, value) -> Optional[Equation]:
    """symbol = value."""
    return linear([(symbol, 1)], -value)


def solve_single(eq: Equation, target: QuantitySymbol, known: Mapping):
    """Closed-form value of the one unknown `target`, or None when the shape
    gives no usable solution."""
    coef = eq.coefficient(target)
    if eq.shape == LINEAR:
        rest = sum((c * known[s] for s, c in eq.terms if s != target), eq.constant)
        return snap(-rest / coef)
    if eq.shape == SQUARES:
        rest = sum((c * known[s] * known[s] for s, c in eq.terms if s != target), eq.constant)
        square = -rest / coef
        if float(square) <= 0:
            raise InconsistentFacts(f"{target} would have non-positive square {float(square):g}", target)
        return exact_sqrt(square)
    rest = Fraction(1)
    for s, e in eq.terms:
        if s == target:
            continue
        if known[s] == 0:
            return None
        rest = rest * _power(known[s], e)
    power = eq.constant / rest
    if coef == 1:
        return snap(power)
    if coef == -1:
        return snap(1 / power)
    if abs(coef) == 2:
        if float(power) <= 0:
            return None
        root = exact_sqrt(power)
        return root if coef > 0 else snap(1 / root)
    return snap(float(power) ** (1.0 / coef))


def describe(eq: Equation) -> str:
    """Plain-text rendering used in logs and trace dumps."""
    if eq.shape == PRODUCT:
        parts = []
        for s, e in eq.terms:
            parts.append(str(s) if e == 1 else f"{s}^{e}")
        return f"{' * '.join(parts)} = {float(eq.constant):g}"
    power = "^2" if eq.shape == SQUARES else ""
    parts = []
    for s, c in eq.terms:
        head = "" if c == 1 else ("-" if c == -1 else f"{float(c):g}*")
        parts.append(f"{head}{s}{power}")
    return f"{' + '.join(parts)} = {float(-eq.constant):g}"
