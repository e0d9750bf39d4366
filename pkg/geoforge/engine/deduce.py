"""
Breadth-first forward chaining with algebraic propagation
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ..cdl.facts import FormalProblem, RelationFact
from ..cdl.printer import format_fact, human_value
from ..errors import ConfigError, GeoForgeError, InconsistentFacts
from ..log import debug_log
from . import equations as E
from .store import Binding, DerivationStep, FactStore
from .symbols import Determination, MetricSet, QuantitySymbol
from .theorems import THEOREMS, Theorem

SOLVE_EQUATION = "solve_equation"
SOLVE_LINEAR_SYSTEM = "solve_linear_system"
ALGEBRA = (SOLVE_EQUATION, SOLVE_LINEAR_SYSTEM)

DEFAULT_MAX_ROUNDS = 8
DEFAULT_TIMEOUT = 10.0
TINY = 1e-12


@dataclass(frozen=True)
class DeductionBudget:
    max_rounds: int = DEFAULT_MAX_ROUNDS
    timeout: float = DEFAULT_TIMEOUT

    def __post_init__(self):
        if self.max_rounds <= 0 or self.timeout <= 0:
            raise ConfigError("deduction budget needs positive rounds and timeout")


@dataclass(frozen=True)
class Solved:
    value: object


@dataclass(frozen=True)
class Unsolved:
    pass


@dataclass
class DeductionResult:
    problem: FormalProblem
    store: FactStore
    goal_symbol: Optional[QuantitySymbol]
    goal_status: object
    rounds: int = 0
    timed_out: bool = False
    trace: List[DerivationStep] = field(default_factory=list)

    @property
    def solved(self) -> bool:
        return isinstance(self.goal_status, Solved)


def match_theorem(t: Theorem, store: FactStore) -> List[Binding]:
    """Bindings of `t` over the store that have not been applied yet."""
    out = []
    seen = set()
    for binding in t.match(store):
        if binding is None:
            continue
        ident = (t.id, binding.key)
        if ident in store.applied or ident in seen:
            continue
        seen.add(ident)
        out.append(binding)
    return out


# linear elimination


def _zero(c) -> bool:
    return c == 0 or (isinstance(c, float) and abs(c) < TINY)


def _eliminate(rows: Sequence[Tuple[int, E.Equation]], known: Mapping):
    """Sparse Gauss-Jordan elimination; returns pivot symbol -> (coefs, const, provenance)."""
    pivots: Dict[QuantitySymbol, tuple] = {}
    for rid, eq in rows:
        coefs: Dict[QuantitySymbol, object] = {}
        const = eq.constant
        for s, c in eq.terms:
            if s in known:
                const = const + c * known[s]
            else:
                coefs[s] = coefs.get(s, 0) + c
        prov = {rid}
        while True:
            hit = next((s for s in sorted(coefs) if s in pivots), None)
            if hit is None:
                break
            factor = coefs.pop(hit)
            pc, pk, pp = pivots[hit]
            for s, c in pc.items():
                if s != hit:
                    coefs[s] = coefs.get(s, 0) - factor * c
            const = const - factor * pk
            prov |= pp
            coefs = {s: c for s, c in coefs.items() if not _zero(c)}
        if not coefs:
            if abs(float(const)) > E.CONFLICT_TOL * max(1.0, abs(float(eq.constant))):
                raise InconsistentFacts(f"linear system is contradictory (gap {float(const):g})")
            continue
        pivot = min(coefs)
        lead = coefs[pivot]
        coefs = {s: c / lead for s, c in coefs.items()}
        const = const / lead
        for s in list(pivots):
            pc, pk, pp = pivots[s]
            if pivot in pc:
                factor = pc[pivot]
                merged = {t: c for t, c in pc.items() if t != pivot}
                for t, c in coefs.items():
                    if t != pivot:
                        merged[t] = merged.get(t, 0) - factor * c
                merged = {t: c for t, c in merged.items() if not _zero(c)}
                pivots[s] = (merged, pk - factor * const, pp | prov)
        pivots[pivot] = (coefs, const, frozenset(prov))
    return pivots


def solve_linear_subset(eqs: Sequence[E.Equation], target: QuantitySymbol, known: Mapping):
    """Value of `target` pinned down by the linear equations `eqs`, or None."""
    pivots = _eliminate(list(enumerate(eqs)), known)
    row = pivots.get(target)
    if row is None or set(row[0]) != {target}:
        return None
    return E.snap(-row[1])


def _premises_for(store: FactStore, eqs, target) -> Tuple[int, ...]:
    ids = [store.equations[eq] for eq in eqs]
    knowns = {s for eq in eqs for s in eq.symbols if s != target}
    return tuple(sorted(set(ids) | set(store.value_premises(*sorted(knowns)))))


def _solve_linear_system(store: FactStore) -> List[QuantitySymbol]:
    rows = [
        (fid, eq)
        for eq, fid in sorted(store.equations.items(), key=lambda kv: kv[1])
        if eq.shape == E.LINEAR and eq.unknowns(store.determined)
    ]
    if len(rows) < 2:
        return []
    pivots = _eliminate(rows, store.determined)
    by_id = {fid: eq for fid, eq in rows}
    found = []
    for symbol in sorted(pivots):
        coefs, _, prov = pivots[symbol]
        if set(coefs) != {symbol} or symbol in store.determined:
            continue
        eqs = tuple(by_id[fid] for fid in sorted(prov))
        value = solve_linear_subset(eqs, symbol, store.determined)
        if value is None:
            continue
        binding = Binding(
            SOLVE_LINEAR_SYSTEM, (eqs, symbol), _premises_for(store, eqs, symbol), (Determination(symbol, value),)
        )
        if store.apply(binding):
            found.append(symbol)
    return found


def propagate(store: FactStore) -> List[QuantitySymbol]:
    """Solve every equation with one closed-form unknown, then eliminate the
    linear system, until nothing changes."""
    new: List[QuantitySymbol] = []
    while True:
        progressed = False
        for eq, fid in sorted(store.equations.items(), key=lambda kv: kv[1]):
            unknowns = eq.unknowns(store.determined)
            if len(unknowns) != 1:
                continue
            target = unknowns[0]
            value = E.solve_single(eq, target, store.determined)
            if value is None:
                continue
            binding = Binding(
                SOLVE_EQUATION, (eq, target), _premises_for(store, (eq,), target), (Determination(target, value),)
            )
            if store.apply(binding):
                new.append(target)
                progressed = True
        if progressed:
            continue
        solved = _solve_linear_system(store)
        if not solved:
            return new
        new.extend(solved)


def deduce(
    problem: FormalProblem,
    budget: Optional[DeductionBudget] = None,
    stop_on_goal: bool = True,
    theorems: Optional[Mapping[str, Theorem]] = None,
) -> DeductionResult:
    """Apply every matching theorem level by level, propagating after each round."""
    budget = budget or DeductionBudget()
    library = list((theorems or THEOREMS).values())
    started = time.monotonic()
    store = FactStore(problem)
    goal = store.goal_symbol
    propagate(store)

    rounds = 0
    timed_out = False
    while rounds < budget.max_rounds:
        if stop_on_goal and goal is not None and goal in store.determined:
            break
        if time.monotonic() - started > budget.timeout:
            timed_out = True
            break
        rounds += 1
        bindings = [b for t in library for b in match_theorem(t, store)]
        if not bindings:
            break
        before = len(store.facts)
        for binding in bindings:
            store.apply(binding)
        propagate(store)
        if len(store.facts) == before:
            break

    status = Solved(store.determined[goal]) if goal in store.determined else Unsolved()
    if timed_out:
        debug_log(f"deduction of {problem.id or 'problem'} timed out after {rounds} round(s)", "WARN")
    debug_log(
        f"deduced {problem.id or 'problem'}: {rounds} round(s), {len(store.steps)} step(s), "
        f"{len(store.determined)} value(s), goal {'solved' if isinstance(status, Solved) else 'open'}",
        "DEBUG",
    )
    return DeductionResult(problem, store, goal, status, rounds, timed_out, list(store.steps))


def extract_metrics(result: DeductionResult) -> MetricSet:
    return MetricSet(result.store.determined)


def statement_metrics(result: DeductionResult) -> MetricSet:
    return MetricSet(result.store.statement_values)


def goal_trace(result: DeductionResult, symbol: Optional[QuantitySymbol] = None) -> List[DerivationStep]:
    """The steps a determination depends on, in chronological order."""
    store = result.store
    symbol = symbol or result.goal_symbol
    fid = store.value_fact.get(symbol)
    if fid is None:
        return []
    needed = set()
    stack = [fid]
    seen = set()
    while stack:
        current = stack.pop()
        if current in seen:
            continue
        seen.add(current)
        step = store.facts[current].step
        if step is None:
            continue
        needed.add(step)
        stack.extend(store.steps[step].premises)
    return [store.steps[i] for i in sorted(needed)]


def _holds(store: FactStore, item) -> bool:
    if isinstance(item, RelationFact):
        return store.has_relation(item)
    if isinstance(item, E.Equation):
        return item in store.equations
    if isinstance(item, Determination):
        return item.symbol in store.determined
    return False


def _replay_algebra(store: FactStore, step: DerivationStep) -> Optional[Binding]:
    if step.theorem == SOLVE_EQUATION:
        eq, target = step.binding
        if eq.unknowns(store.determined) != (target,):
            return None
        value = E.solve_single(eq, target, store.determined)
    else:
        eqs, target = step.binding
        value = solve_linear_subset(eqs, target, store.determined)
    if value is None:
        return None
    return Binding(step.theorem, step.binding, step.premises, (Determination(target, value),))


def replay(problem: FormalProblem, steps: Sequence[DerivationStep]) -> Dict[QuantitySymbol, object]:
    """Re-execute a trace from the problem's initial facts; returns the determined values.

    A step whose conclusions already hold (an earlier step in a pruned trace
    concluded them too) is checked instead of re-applied.
    """
    store = FactStore(problem)
    for step in steps:
        if all(_holds(store, item) for item in step.conclusions):
            for item in step.conclusions:
                if isinstance(item, Determination) and not E.close(store.determined[item.symbol], item.value):
                    raise InconsistentFacts(f"replay of step {step.index} disagrees on {item.symbol}", item.symbol)
            continue
        if step.theorem in ALGEBRA:
            binding = _replay_algebra(store, step)
        else:
            rule = THEOREMS.get(step.theorem)
            binding = None
            if rule is not None:
                binding = next((b for b in rule.match(store) if b is not None and b.key == step.binding), None)
        if binding is None:
            raise GeoForgeError(f"step {step.index} ({step.theorem}) does not replay")
        store.apply(binding)
    return dict(store.determined)


def describe_conclusion(item) -> str:
    if isinstance(item, RelationFact):
        return format_fact(item)
    if isinstance(item, E.Equation):
        return E.describe(item)
    if isinstance(item, Determination):
        return f"{item.symbol} = {human_value(item.value)}"
    return str(item)


def trace_to_json(steps: Sequence[DerivationStep]) -> list:
    return [
        {
            "index": step.index,
            "theorem": step.theorem,
            "premises": list(step.premises),
            "conclusions": [describe_conclusion(c) for c in step.conclusions],
        }
        for step in steps
    ]
