"""
Back-translation pairs: printed CDL next to the template text of the same
problem, with point names shuffled
"""

from __future__ import annotations

import string
from dataclasses import replace
from typing import Dict, List, Sequence

from ..cdl.facts import ConstructionFact, FormalProblem, Goal, MetricFact, RelationFact
from ..cdl.printer import print_problem
from .templates import TemplateBank, default_bank
from .text import verbalize_problem

LETTERS = string.ascii_uppercase


def _map(points, mapping):
    return tuple(mapping[p] for p in points)


def relabel(problem: FormalProblem, mapping: Dict[str, str]) -> FormalProblem:
    """Rename every point through mapping."""

    def fact(f):
        if isinstance(f, MetricFact):
            return MetricFact(f.quantity, _map(f.args, mapping), f.value)
        if isinstance(f, RelationFact):
            return RelationFact(f.predicate, tuple(_map(a, mapping) for a in f.args))
        raise TypeError(f"cannot relabel {f!r}")

    constructions = tuple(
        ConstructionFact(c.kind, tuple(_map(a, mapping) for a in c.args)) for c in problem.constructions
    )
    goal = Goal(problem.goal.quantity, _map(problem.goal.args, mapping)) if problem.goal else None
    return replace(
        problem,
        constructions=constructions,
        text_facts=tuple(fact(f) for f in problem.text_facts),
        image_facts=tuple(fact(f) for f in problem.image_facts),
        goal=goal,
    )


def _all_points(problem: FormalProblem):
    seen = dict.fromkeys(problem.points)
    for f in problem.statement_facts:
        seen.update(dict.fromkeys(f.points))
    if problem.goal is not None:
        seen.update(dict.fromkeys(problem.goal.points))
    return tuple(seen)


def random_mapping(points: Sequence[str], rng) -> Dict[str, str]:
    if len(points) > len(LETTERS):
        raise ValueError(f"cannot relabel {len(points)} points with single letters")
    return dict(zip(points, rng.sample(LETTERS, len(points))))


def backtranslate_pairs(problems: Sequence[FormalProblem], bank: TemplateBank = None, rng=None, count: int = 1) -> List[dict]:
    """`count` pairs per problem; every statement fact is spelled out in the text."""
    bank = bank or default_bank()
    pairs = []
    for problem in problems:
        if problem.goal is None:
            continue
        merged = problem.with_statement(problem.statement_facts, ())
        for k in range(count):
            renamed = relabel(merged, random_mapping(_all_points(merged), rng))
            pairs.append({
                "id": f"{problem.id}_bt{k}" if problem.id else f"bt{len(pairs)}",
                "cdl": print_problem(replace(renamed, id="")),
                "text": verbalize_problem(renamed, bank, rng),
            })
    return pairs
