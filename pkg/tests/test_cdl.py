from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import problem
from geoforge.cdl import (
    MetricFact,
    RelationFact,
    format_fact,
    parse_problem,
    parse_seed_json,
    parse_statement,
    print_problem,
    problem_to_json,
    scan_problem,
    validate,
)
from geoforge.cdl.facts import FormalProblem
from geoforge.errors import ArityMismatch, CDLSyntaxError, UnknownPredicate

TRIANGLE = """
# problem: tri
Shape(AB,BC,CA)
Equal(LengthOfLine(AB),5)
image:Equal(MeasureOfAngle(ABC),40)
Value(LengthOfLine(AC))
"""


def test_parse_splits_channels_and_goal():
    p = parse_problem(TRIANGLE)
    assert p.id == "tri"
    assert len(p.constructions) == 1
    assert p.text_facts == (MetricFact("LengthOfLine", ("A", "B"), Fraction(5)),)
    assert p.image_facts == (MetricFact("MeasureOfAngle", ("A", "B", "C"), Fraction(40)),)
    assert p.goal.quantity == "LengthOfLine"
    assert p.goal.args == ("A", "C")


def test_printed_problem_parses_back(seed_problems):
    for p in seed_problems:
        again = parse_problem(print_problem(p))
        assert again.structural_key() == p.structural_key()
        assert again.id == p.id


def test_seed_json_round_trip(seed_problems):
    for p in seed_problems:
        assert parse_seed_json(problem_to_json(p)) == p


def test_fraction_values_stay_exact():
    kind, fact = parse_statement("Equal(LengthOfLine(AB),3/2)")
    assert kind == "fact"
    assert fact.value == Fraction(3, 2)
    assert format_fact(fact) == "Equal(LengthOfLine(AB),3/2)"


def test_decimal_values_are_floats():
    _, fact = parse_statement("Equal(LengthOfLine(AB),2.5)")
    assert isinstance(fact.value, float)
    assert fact.value == 2.5


def test_multi_character_point_labels():
    _, fact = parse_statement("ParallelBetweenLine(A1B,CD2)")
    assert fact == RelationFact("ParallelBetweenLine", (("A1", "B"), ("C", "D2")))


def test_unknown_predicate():
    with pytest.raises(UnknownPredicate) as info:
        parse_statement("Tangential(AB,O)")
    assert info.value.name == "Tangential"


def test_arity_mismatch():
    with pytest.raises(ArityMismatch):
        parse_statement("IsMidpointOfLine(MN,AB)")
    with pytest.raises(ArityMismatch):
        parse_statement("Equal(MeasureOfAngle(AB),30)")


@pytest.mark.parametrize("text", [
    "Shape(AB,BC",
    "Equal(LengthOfLine(AB),x)",
    "Shape(AB,BC)",
    "Shape(AB,CD,DA)",
    "Collinear(ABA)",
    "Cocircular(O,AOB)",
    "Equal(LengthOfLine(AB),1/0)",
])
def test_syntax_errors(text):
    with pytest.raises(CDLSyntaxError):
        parse_statement(text)


def test_scan_keeps_going_after_a_bad_line():
    source = "Shape(AB,BC,CA)\nFoo(AB)\nEqual(LengthOfLine(AB),2)\nValue(LengthOfLine(BC))\n"
    p, errors = scan_problem(source, "x")
    assert len(errors) == 1
    assert errors[0].line == 2
    assert len(p.text_facts) == 1
    assert p.goal is not None


def test_goal_cannot_be_an_image_fact():
    _, errors = scan_problem("Shape(AB,BC,CA)\nimage:Value(LengthOfLine(AB))\n")
    assert errors and "goal" in errors[0].reason


def test_empty_source_is_rejected():
    with pytest.raises(CDLSyntaxError):
        parse_problem("   \n")


def test_validate_accepts_a_clean_problem():
    report = validate(parse_problem(TRIANGLE))
    assert report.ok
    assert report.summary() == "ok"


def test_validate_reports_undeclared_point():
    p = problem("Shape(AB,BC,CA)\nEqual(LengthOfLine(AD),3)\nValue(LengthOfLine(BC))")
    report = validate(p)
    assert report.kinds() == ("UndeclaredPoint",)
    assert report.by_kind("UndeclaredPoint")[0].detail == "D"


def test_validate_reports_channel_overlap():
    fact = MetricFact("LengthOfLine", ("A", "B"), Fraction(3))
    base = problem("Shape(AB,BC,CA)\nValue(LengthOfLine(BC))")
    p = base.with_statement((fact,), (fact,))
    assert "ChannelOverlap" in validate(p).kinds()


def test_validate_reports_goal_stated_as_premise():
    p = problem("Shape(AB,BC,CA)\nEqual(LengthOfLine(BA),3)\nValue(LengthOfLine(AB))")
    assert validate(p).kinds() == ("GoalStatedAsPremise",)


def test_validate_reports_two_values_for_one_head():
    p = problem("Shape(AB,BC,CA)\nEqual(MeasureOfAngle(ABC),30)\nimage:Equal(MeasureOfAngle(CBA),40)")
    assert "DuplicateFact" in validate(p).kinds()


def test_validate_reports_out_of_range_values():
    fact = MetricFact("MeasureOfAngle", ("A", "B", "C"), Fraction(400))
    p = FormalProblem(problem("Shape(AB,BC,CA)").constructions, (fact,))
    assert validate(p).kinds() == ("OutOfRange",)


@given(st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(10 ** 6), max_denominator=10 ** 6))
def test_exact_values_survive_printing(value):
    fact = MetricFact("LengthOfLine", ("A", "B"), value)
    _, again = parse_statement(format_fact(fact))
    assert again.value == value


@given(st.floats(min_value=1e-3, max_value=1e6, allow_nan=False, allow_infinity=False))
def test_float_values_survive_printing(value):
    fact = MetricFact("LengthOfLine", ("A", "B"), value)
    _, again = parse_statement(format_fact(fact))
    assert float(again.value) == value
