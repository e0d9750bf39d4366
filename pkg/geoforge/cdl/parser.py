"""
Recursive-descent parser for CDL statements and problems

Grammar (whitespace-insensitive, one statement per line):

    line      := [ "image:" ] call | "# problem:" id | "#" comment
    call      := NAME "(" arg { "," arg } ")"
    arg       := call | number [ "/" number ] | NAME
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from ..errors import ArityMismatch, CDLError, CDLSyntaxError, UnknownPredicate
from . import catalog
from .facts import ConstructionFact, FormalProblem, Goal, MetricFact, RelationFact, split_points

IMAGE_PREFIX = "image:"
ID_COMMENT_RE = re.compile(r"^#\s*problem\s*:\s*(?P<id>\S+)\s*$")

_TOKEN_RE = re.compile(
    r"(?P<num>-?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)|(?P<name>[A-Za-z][A-Za-z0-9]*)|(?P<punct>[(),/])"
)


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Node", ...]


@dataclass(frozen=True)
class Atom:
    text: str


@dataclass(frozen=True)
class Number:
    value: Union[Fraction, float]


Node = Union[Call, Atom, Number]


class _StatementParser:
    def __init__(self, text, line=None):
        self.text = text
        self.line = line
        self.tokens = self._tokenize(text)
        self.pos = 0

    def _error(self, reason):
        return CDLSyntaxError(reason, self.line, self.text)

    def _tokenize(self, text):
        tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if not m:
                raise self._error(f"unexpected character {text[pos]!r}")
            kind = m.lastgroup
            tokens.append((kind, m.group(kind)))
            pos = m.end()
        return tokens

    def _peek(self, offset=0):
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else (None, None)

    def _take(self, kind=None, value=None):
        tok = self._peek()
        if tok[0] is None:
            raise self._error("unexpected end of statement")
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            raise self._error(f"expected {value or kind}, found {tok[1]!r}")
        self.pos += 1
        return tok

    def parse(self) -> Call:
        call = self._call()
        if self.pos != len(self.tokens):
            raise self._error(f"trailing input {self._peek()[1]!r}")
        return call

    def _call(self) -> Call:
        _, name = self._take("name")
        self._take("punct", "(")
        args = [self._arg()]
        while self._peek() == ("punct", ","):
            self.pos += 1
            args.append(self._arg())
        self._take("punct", ")")
        return Call(name, tuple(args))

    def _arg(self) -> Node:
        kind, value = self._peek()
        if kind == "name":
            if self._peek(1) == ("punct", "("):
                return self._call()
            self.pos += 1
            return Atom(value)
        if kind == "num":
            self.pos += 1
            number = _number(value)
            if self._peek() == ("punct", "/"):
                self.pos += 1
                _, denom = self._take("num")
                number = _ratio(number, _number(denom), self._error)
            return Number(number)
        raise self._error(f"unexpected {value!r}")


def _number(text):
    if re.fullmatch(r"-?\d+", text):
        return Fraction(int(text))
    return float(text)


def _ratio(num, den, error):
    if not isinstance(num, Fraction) or not isinstance(den, Fraction):
        raise error("fractions take integer parts")
    if den == 0:
        raise error("zero denominator")
    return num / den


def _points(node, line, text):
    if not isinstance(node, Atom):
        raise CDLSyntaxError("expected a point list", line, text)
    try:
        return split_points(node.text)
    except CDLSyntaxError as e:
        raise CDLSyntaxError(e.reason, line, text)


def _quantity(node, line, text):
    if not isinstance(node, Call):
        raise CDLSyntaxError("expected a quantity", line, text)
    if node.name not in catalog.QUANTITIES:
        raise UnknownPredicate(node.name, line, text)
    if len(node.args) != 1:
        raise ArityMismatch(node.name, "1 argument", f"{len(node.args)} arguments", line, text)
    points = _points(node.args[0], line, text)
    if not catalog.quantity_arity_ok(node.name, len(points)):
        raise ArityMismatch(node.name, catalog.describe_arity(node.name), f"{len(points)} point(s)", line, text)
    return node.name, points


def _shape(call, line, text):
    edges = tuple(_points(arg, line, text) for arg in call.args)
    for edge in edges:
        if len(edge) != 2:
            raise ArityMismatch("Shape", "2-point edges", f"{len(edge)}-point edge", line, text)
    if len(edges) < 3:
        raise CDLSyntaxError("edge chain needs at least 3 edges", line, text)
    for current, following in zip(edges, edges[1:] + edges[:1]):
        if current[1] != following[0]:
            raise CDLSyntaxError("edge chain not closed", line, text)
    starts = [edge[0] for edge in edges]
    if len(set(starts)) != len(starts):
        raise CDLSyntaxError("edge chain crosses itself", line, text)
    return ConstructionFact("Shape", edges)


def _construction(call, line, text):
    if call.name == "Shape":
        return _shape(call, line, text)
    if call.name == "Collinear":
        if len(call.args) != 1:
            raise ArityMismatch("Collinear", "1 argument", f"{len(call.args)} arguments", line, text)
        points = _points(call.args[0], line, text)
        if len(points) < 3:
            raise ArityMismatch("Collinear", "3+ points", f"{len(points)} point(s)", line, text)
        if len(set(points)) != len(points):
            raise CDLSyntaxError("repeated point in Collinear", line, text)
        return ConstructionFact("Collinear", (points,))
    # Cocircular
    if len(call.args) != 2:
        raise ArityMismatch("Cocircular", "2 arguments", f"{len(call.args)} arguments", line, text)
    center = _points(call.args[0], line, text)
    points = _points(call.args[1], line, text)
    if len(center) != 1:
        raise ArityMismatch("Cocircular", "1-point center", f"{len(center)} point(s)", line, text)
    if len(set(points)) != len(points) or center[0] in points:
        raise CDLSyntaxError("repeated point in Cocircular", line, text)
    return ConstructionFact("Cocircular", (center, points))


def _relation(call, line, text):
    arity = catalog.RELATIONS[call.name]
    if len(call.args) != len(arity):
        raise ArityMismatch(call.name, f"{len(arity)} arguments", f"{len(call.args)} arguments", line, text)
    args = []
    for node, size in zip(call.args, arity):
        points = _points(node, line, text)
        if len(points) != size:
            raise ArityMismatch(call.name, f"{size}-point argument", f"{len(points)}-point argument", line, text)
        args.append(points)
    return RelationFact(call.name, tuple(args))


def interpret(call: Call, line=None, text=None):
    """Map a parsed call to ('construction'|'fact'|'goal', object)."""
    name = call.name
    if name in catalog.CONSTRUCTIONS:
        return "construction", _construction(call, line, text)
    if name in catalog.RELATIONS:
        return "fact", _relation(call, line, text)
    if name == "Equal":
        if len(call.args) != 2:
            raise ArityMismatch("Equal", "2 arguments", f"{len(call.args)} arguments", line, text)
        quantity, points = _quantity(call.args[0], line, text)
        if not isinstance(call.args[1], Number):
            raise CDLSyntaxError("Equal takes a numeric value", line, text)
        return "fact", MetricFact(quantity, points, call.args[1].value)
    if name == "Value":
        if len(call.args) != 1:
            raise ArityMismatch("Value", "1 argument", f"{len(call.args)} arguments", line, text)
        quantity, points = _quantity(call.args[0], line, text)
        return "goal", Goal(quantity, points)
    raise UnknownPredicate(name, line, text)


def parse_statement(text: str, line=None):
    """Parse one statement (without channel prefix) into its kind and object."""
    compact = "".join(text.split())
    if not compact:
        raise CDLSyntaxError("empty statement", line, text)
    return interpret(_StatementParser(compact, line).parse(), line, text)


def scan_problem(source: str, problem_id: Optional[str] = None) -> Tuple[Optional[FormalProblem], List[CDLError]]:
    """Total parse: every non-blank line becomes a fact, the goal, or a diagnostic."""
    constructions, text_facts, image_facts = [], [], []
    goal = None
    diagnostics: List[CDLError] = []
    pid = problem_id or ""
    for number, raw in enumerate(source.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("#"):
            m = ID_COMMENT_RE.match(stripped)
            if m and not problem_id:
                pid = m.group("id")
            continue
        body = stripped.split("#", 1)[0].strip()
        if not body:
            continue
        channel = "text"
        if body.lower().startswith(IMAGE_PREFIX):
            channel = "image"
            body = body[len(IMAGE_PREFIX):]
        try:
            kind, obj = parse_statement(body, number)
        except CDLError as e:
            diagnostics.append(e)
            continue
        if kind == "construction":
            if channel == "image":
                diagnostics.append(CDLSyntaxError("constructions have no channel", number, raw))
                continue
            constructions.append(obj)
        elif kind == "goal":
            if channel == "image":
                diagnostics.append(CDLSyntaxError("the goal has no channel", number, raw))
            elif goal is not None:
                diagnostics.append(CDLSyntaxError("second goal statement", number, raw))
            else:
                goal = obj
        elif channel == "image":
            image_facts.append(obj)
        else:
            text_facts.append(obj)
    if not (constructions or text_facts or image_facts or goal):
        if not diagnostics:
            diagnostics.append(CDLSyntaxError("no statements"))
        return None, diagnostics
    problem = FormalProblem(tuple(constructions), tuple(text_facts), tuple(image_facts), goal, pid)
    return problem, diagnostics


def parse_problem(source: str, problem_id: Optional[str] = None) -> FormalProblem:
    """Parse CDL text, raising the first diagnostic."""
    if not source or not source.strip():
        raise CDLSyntaxError("empty source")
    problem, diagnostics = scan_problem(source, problem_id)
    if diagnostics:
        raise diagnostics[0]
    return problem


def _as_lines(entry):
    if entry is None:
        return []
    if isinstance(entry, str):
        return [entry]
    return [str(s) for s in entry]


def seed_json_source(obj: dict) -> str:
    """Compose CDL text from a seed annotation object."""
    lines = []
    lines.extend(_as_lines(obj.get("construction_cdl")))
    lines.extend(_as_lines(obj.get("text_cdl")))
    lines.extend(IMAGE_PREFIX + s for s in _as_lines(obj.get("image_cdl")))
    lines.extend(_as_lines(obj.get("goal_cdl")))
    return "\n".join(lines)


def scan_seed_json(obj: dict, default_id: str = ""):
    pid = str(obj.get("problem_id", obj.get("id", default_id)))
    return scan_problem(seed_json_source(obj), pid)


def parse_seed_json(obj: dict, default_id: str = "") -> FormalProblem:
    problem, diagnostics = scan_seed_json(obj, default_id)
    if diagnostics:
        raise diagnostics[0]
    return problem
