"""
Problem synthesis from a formalized seed: swap metric conditions, pick a
fresh goal, make sure the engine can solve it, and split the statement
between the question text and the diagram.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple, Union

from .cdl.facts import FormalProblem, Goal, MetricFact, Value
from .cdl.validate import validate
from .engine import (
    ALGEBRA,
    DeductionBudget,
    DeductionResult,
    DerivationStep,
    MetricSet,
    QuantitySymbol,
    deduce,
    extract_metrics,
    goal_trace,
    statement_metrics,
)
from .engine.figure import Figure
from .errors import InconsistentFacts, NoGoalAvailable, Rejected, SeedExhausted
from .log import debug_log
from .rng import RNGManager

ORIGINAL = "Original"
FALLBACK = "FallbackLastInference"

DEFAULT_IMAGE_RATIO = 0.5
ATTEMPTS_PER_CANDIDATE = 10

# synth-stage rejection reasons
SYNTH_REASONS = ("SeedExhausted", "NoGoal", "Invalid", "Inconsistent", "NoInference", "Duplicate", "EngineCrash")


@dataclass(frozen=True)
class FormalizedSeed:
    problem: FormalProblem
    deduction: DeductionResult
    m_p: MetricSet
    m_all: MetricSet

    @property
    def id(self) -> str:
        return self.problem.id

    @property
    def spare(self) -> Tuple[QuantitySymbol, ...]:
        return tuple(s for s in self.m_all if s not in self.m_p)


def formalize(problem: FormalProblem, budget: Optional[DeductionBudget] = None) -> FormalizedSeed:
    """Deduce the seed's full closure (no early stop on the goal)."""
    result = deduce(problem, budget, stop_on_goal=False)
    return FormalizedSeed(problem, result, statement_metrics(result), extract_metrics(result))


@dataclass(frozen=True)
class SwapRecord:
    deleted: Tuple[MetricFact, ...]
    added: Tuple[MetricFact, ...]
    n: int


@dataclass(frozen=True)
class SynthesisCandidate:
    problem: FormalProblem
    trace: Tuple[DerivationStep, ...]
    swap: Optional[SwapRecord]
    provenance: str
    goal_symbol: QuantitySymbol
    goal_value: Value
    seed_id: str = ""

    @property
    def id(self) -> str:
        return self.problem.id


@dataclass
class SynthesisBatch:
    seed_id: str
    candidates: List[SynthesisCandidate] = field(default_factory=list)
    rng_seed: int = 0
    diagnostics: Counter = field(default_factory=Counter)

    @property
    def attempted(self) -> int:
        return len(self.candidates) + sum(self.diagnostics.values())


def mutate_conditions(seed: FormalizedSeed, rng) -> Tuple[FormalProblem, SwapRecord]:
    """Replace n statement metrics with n closure metrics the statement lacks."""
    held = list(seed.m_p)
    spare = list(seed.spare)
    if not spare or not held:
        raise SeedExhausted(f"seed {seed.id} has no spare metric conditions")
    n = rng.randint(1, min(len(held), len(spare)))
    deleted = sorted(rng.sample(held, n))
    added = sorted(rng.sample(spare, n))
    kept = [s for s in held if s not in deleted]
    metrics = [s.as_fact(seed.m_p[s]) for s in kept] + [s.as_fact(seed.m_all[s]) for s in added]
    relations = list(seed.problem.relation_facts)
    mutated = FormalProblem(seed.problem.constructions, tuple(relations + metrics), (), None, seed.problem.id)
    record = SwapRecord(
        tuple(s.as_fact(seed.m_p[s]) for s in deleted),
        tuple(s.as_fact(seed.m_all[s]) for s in added),
        n,
    )
    return mutated, record


def stated_symbols(problem: FormalProblem, figure: Optional[Figure] = None) -> set:
    figure = figure or Figure(problem.constructions)
    return {figure.symbol(f.quantity, f.args) for f in problem.metric_facts}


def select_goal(mutated: FormalProblem, m_all: MetricSet, rng) -> Goal:
    """Uniform choice among closure metrics the statement does not give."""
    stated = stated_symbols(mutated)
    choices = [s for s in m_all if s not in stated]
    if not choices:
        raise NoGoalAvailable(f"every closure metric of {mutated.id} is already stated")
    return rng.choice(choices).as_goal()


def _last_inference(result: DeductionResult) -> Optional[QuantitySymbol]:
    stated = set(result.store.statement_values)
    for fact in reversed(result.store.facts):
        if fact.kind == "value" and fact.step is not None and fact.item.symbol not in stated:
            return fact.item.symbol
    return None


def ensure_solvable(
    problem: FormalProblem,
    budget: Optional[DeductionBudget] = None,
    swap: Optional[SwapRecord] = None,
) -> Union[SynthesisCandidate, Rejected]:
    """Solve the candidate; fall back to the engine's last new determination."""
    report = validate(problem)
    if not report.ok:
        return Rejected("Invalid", report.summary())
    try:
        result = deduce(problem, budget)
    except InconsistentFacts as e:
        return Rejected("Inconsistent", str(e))

    if result.solved:
        symbol, provenance = result.goal_symbol, ORIGINAL
    else:
        symbol = _last_inference(result)
        if symbol is None:
            return Rejected("NoInference", "the engine determined nothing new")
        problem = replace(problem, goal=symbol.as_goal())
        provenance = FALLBACK

    trace = goal_trace(result, symbol)
    if not any(step.theorem not in ALGEBRA for step in trace):
        return Rejected("NoInference", "goal needs no theorem")
    value = result.store.determined[symbol]
    return SynthesisCandidate(problem, tuple(trace), swap, provenance, symbol, value, problem.id)


def allocate_channels(facts: Sequence, rng, image_ratio: float = DEFAULT_IMAGE_RATIO):
    """Each metric fact goes to the diagram with probability image_ratio; at
    least one does whenever there is any. Relations stay in the text."""
    metrics = [f for f in facts if isinstance(f, MetricFact)]
    if not metrics:
        return tuple(facts), ()
    others = [f for f in facts if not isinstance(f, MetricFact)]
    to_image = [rng.random() < image_ratio for _ in metrics]
    if not any(to_image):
        to_image[rng.randrange(len(metrics))] = True
    text = tuple(others) + tuple(m for m, flag in zip(metrics, to_image) if not flag)
    image = tuple(m for m, flag in zip(metrics, to_image) if flag)
    return text, image


def _dedup_key(candidate: SynthesisCandidate):
    figure = Figure(candidate.problem.constructions)
    stated = sorted(
        (figure.symbol(f.quantity, f.args), f.value) for f in candidate.problem.metric_facts
    )
    return tuple(stated), candidate.goal_symbol


def _attempt(seed: FormalizedSeed, rng, budget) -> Union[SynthesisCandidate, Rejected]:
    """One draw; any engine failure rejects the draw instead of the seed."""
    try:
        mutated, swap = mutate_conditions(seed, rng)
    except SeedExhausted as e:
        return Rejected("SeedExhausted", str(e))
    try:
        goal = select_goal(mutated, seed.m_all, rng)
    except NoGoalAvailable as e:
        return Rejected("NoGoal", str(e))
    try:
        return ensure_solvable(replace(mutated, goal=goal), budget, swap)
    except Exception as e:
        debug_log(f"seed {seed.id}: engine crashed: {type(e).__name__}: {e}", "ERROR")
        return Rejected("EngineCrash", f"{type(e).__name__}: {e}")


def synthesize_batch(
    seed: FormalizedSeed,
    m: int,
    streams: RNGManager,
    image_ratio: float = DEFAULT_IMAGE_RATIO,
    budget: Optional[DeductionBudget] = None,
    max_attempts: Optional[int] = None,
) -> SynthesisBatch:
    """Up to m distinct solvable candidates; every attempt draws from its own
    stream named by (seed id, attempt index)."""
    if m < 1:
        raise ValueError("m must be at least 1")
    batch = SynthesisBatch(seed.id, rng_seed=streams.base_seed)
    if not seed.spare or not seed.m_p:
        batch.diagnostics["SeedExhausted"] += 1
        debug_log(f"seed {seed.id}: no spare metric conditions, skipped", "WARN")
        return batch

    limit = max_attempts or ATTEMPTS_PER_CANDIDATE * m
    seen = set()
    failures = 0
    attempt = 0
    while len(batch.candidates) < m and failures < limit:
        rng = streams.fresh(seed.id, attempt, "synth")
        attempt += 1
        outcome = _attempt(seed, rng, budget)
        if isinstance(outcome, Rejected):
            batch.diagnostics[outcome.reason] += 1
            failures += 1
            debug_log(f"seed {seed.id} attempt {attempt - 1}: {outcome.reason} {outcome.detail}", "DEBUG")
            continue
        key = _dedup_key(outcome)
        if key in seen:
            batch.diagnostics["Duplicate"] += 1
            failures += 1
            continue
        seen.add(key)
        failures = 0
        text, image = allocate_channels(outcome.problem.statement_facts, rng, image_ratio)
        cid = f"{seed.id}_{len(batch.candidates):03d}"
        problem = replace(outcome.problem, text_facts=text, image_facts=image, id=cid)
        batch.candidates.append(replace(outcome, problem=problem, seed_id=seed.id))

    if len(batch.candidates) < m:
        debug_log(f"seed {seed.id}: gave up after {limit} consecutive rejections ({len(batch.candidates)}/{m})", "WARN")
    return batch
