import random
from functools import lru_cache

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SEEDS_DIR, problem
from geoforge.cdl import MetricFact, RelationFact, validate
from geoforge.engine import replay
from geoforge.engine.equations import close
from geoforge.errors import NoGoalAvailable, Rejected, SeedExhausted
from geoforge.pipeline import load_seed_problems
from geoforge.rng import RNGManager
from geoforge.synth import (
    FALLBACK,
    ORIGINAL,
    SYNTH_REASONS,
    allocate_channels,
    ensure_solvable,
    formalize,
    mutate_conditions,
    select_goal,
    stated_symbols,
    synthesize_batch,
)

PER_SEED = 4


@pytest.fixture(scope="module")
def formalized(seed_problems):
    return [formalize(p) for p in seed_problems]


@pytest.fixture(scope="module")
def batches(formalized):
    return [(seed, synthesize_batch(seed, PER_SEED, RNGManager(42))) for seed in formalized]


def candidates(batches):
    return [(seed, c) for seed, batch in batches for c in batch.candidates]


@lru_cache(maxsize=None)
def right_triangle_seed():
    problems, _ = load_seed_problems([SEEDS_DIR / "002_right_triangle.json"])
    return formalize(problems[0])


def test_seeds_yield_candidates(batches):
    assert candidates(batches)
    for _, batch in batches:
        assert len(batch.candidates) <= PER_SEED
        assert batch.attempted >= len(batch.candidates)
        assert set(batch.diagnostics) <= set(SYNTH_REASONS)


def test_condition_count_is_preserved(batches):
    for seed, c in candidates(batches):
        assert len(c.problem.metric_facts) == len(seed.m_p)


def test_goal_is_never_stated(batches):
    for _, c in candidates(batches):
        assert c.goal_symbol not in stated_symbols(c.problem)


def test_candidates_validate(batches):
    for _, c in candidates(batches):
        assert validate(c.problem).ok, validate(c.problem).summary()


def test_channels_partition_the_statement(batches):
    for _, c in candidates(batches):
        text, image = c.problem.text_facts, c.problem.image_facts
        assert not set(text) & set(image)
        assert all(isinstance(f, MetricFact) for f in image)
        assert all(f in text for f in c.problem.relation_facts)
        if c.problem.metric_facts:
            assert image


def test_trace_replays_to_the_recorded_answer(batches):
    for _, c in candidates(batches):
        values = replay(c.problem, c.trace)
        assert close(values[c.goal_symbol], c.goal_value)


def test_swap_size_is_bounded(batches):
    for seed, c in candidates(batches):
        swap = c.swap
        assert 1 <= swap.n <= min(len(seed.m_p), len(seed.spare))
        assert len(swap.deleted) == len(swap.added) == swap.n


def test_ids_are_unique_and_carry_the_seed(batches):
    ids = [c.id for _, c in candidates(batches)]
    assert len(ids) == len(set(ids))
    for seed, c in candidates(batches):
        assert c.id.startswith(f"{seed.id}_")
        assert c.seed_id == seed.id
        assert c.provenance in (ORIGINAL, FALLBACK)


def test_batches_are_reproducible(formalized):
    seed = formalized[0]
    first = synthesize_batch(seed, PER_SEED, RNGManager(7))
    second = synthesize_batch(seed, PER_SEED, RNGManager(7))
    assert [c.problem for c in first.candidates] == [c.problem for c in second.candidates]
    assert first.diagnostics == second.diagnostics


def test_batch_needs_a_positive_size(formalized):
    with pytest.raises(ValueError):
        synthesize_batch(formalized[0], 0, RNGManager(1))


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32))
def test_swap_draws_stay_in_range(seed):
    formal = right_triangle_seed()
    mutated, swap = mutate_conditions(formal, random.Random(seed))
    assert 1 <= swap.n <= min(len(formal.m_p), len(formal.spare))
    assert len(mutated.metric_facts) == len(formal.m_p)
    assert mutated.goal is None
    assert not mutated.image_facts


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32), st.floats(min_value=0.0, max_value=1.0))
def test_allocation_keeps_relations_in_text(seed, ratio):
    facts = right_triangle_seed().problem.statement_facts
    text, image = allocate_channels(facts, random.Random(seed), ratio)
    assert sorted(map(repr, text + image)) == sorted(map(repr, facts))
    assert all(f in text for f in facts if isinstance(f, RelationFact))
    assert all(isinstance(f, MetricFact) for f in image)
    assert len(image) >= 1


def test_allocation_extremes():
    facts = right_triangle_seed().problem.statement_facts
    metrics = [f for f in facts if isinstance(f, MetricFact)]
    _, image = allocate_channels(facts, random.Random(3), 1.0)
    assert list(image) == metrics
    _, image = allocate_channels(facts, random.Random(3), 0.0)
    assert len(image) == 1


def test_seed_without_spare_metrics_is_exhausted():
    seed = formalize(problem("Shape(AB,BC,CA)\nEqual(LengthOfLine(AB),3)\nValue(LengthOfLine(BC))"))
    assert seed.spare == ()
    with pytest.raises(SeedExhausted):
        mutate_conditions(seed, random.Random(0))
    batch = synthesize_batch(seed, 3, RNGManager(0))
    assert batch.candidates == []
    assert batch.diagnostics["SeedExhausted"] == 1


def test_no_goal_when_everything_is_stated():
    seed = formalize(problem("Shape(AB,BC,CA)\nEqual(LengthOfLine(AB),3)\nValue(LengthOfLine(BC))"))
    with pytest.raises(NoGoalAvailable):
        select_goal(seed.problem, seed.m_all, random.Random(0))


def test_unsolvable_goal_falls_back_to_last_inference():
    p = problem(
        "Shape(AB,BC,CA)\nEqual(MeasureOfAngle(ABC),50)\nEqual(MeasureOfAngle(BCA),60)\nValue(LengthOfLine(AB))"
    )
    outcome = ensure_solvable(p)
    assert outcome.provenance == FALLBACK
    assert outcome.goal_symbol.kind == "MeasureOfAngle"
    assert outcome.goal_value == 70
    assert outcome.problem.goal == outcome.goal_symbol.as_goal()


def test_invalid_candidate_is_rejected():
    p = problem("Shape(AB,BC,CA)\nEqual(LengthOfLine(AD),3)\nValue(LengthOfLine(BC))")
    outcome = ensure_solvable(p)
    assert isinstance(outcome, Rejected)
    assert outcome.reason == "Invalid"


def test_contradictory_candidate_is_rejected():
    p = problem(
        "Shape(AB,BC,CA)\nRightTriangle(ABC)\nEqual(LengthOfLine(AB),3)\n"
        "Equal(LengthOfLine(BC),4)\nEqual(LengthOfLine(AC),6)\nValue(MeasureOfAngle(BCA))"
    )
    outcome = ensure_solvable(p)
    assert isinstance(outcome, Rejected)
    assert outcome.reason == "Inconsistent"


def test_every_swap_size_is_drawn(formalized):
    for seed in formalized:
        if not seed.spare:
            continue
        top = min(len(seed.m_p), len(seed.spare))
        drawn = {mutate_conditions(seed, random.Random(i))[1].n for i in range(60 * top)}
        assert drawn == set(range(1, top + 1)), seed.id


def test_engine_crash_rejects_the_attempt(monkeypatch):
    seed = right_triangle_seed()

    def broken(*args, **kwargs):
        raise RuntimeError("solver blew up")

    monkeypatch.setattr("geoforge.synth.deduce", broken)
    batch = synthesize_batch(seed, 2, RNGManager(0), max_attempts=5)
    assert batch.candidates == []
    assert batch.diagnostics["EngineCrash"] == 5
    assert batch.attempted == 5
