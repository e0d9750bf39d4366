import random
from fractions import Fraction

import pytest
import requests
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import problem
from geoforge.cdl import MetricFact, human_value, parse_problem
from geoforge.engine import QuantitySymbol, deduce, goal_trace
from geoforge.engine import equations as E
from geoforge.errors import ConfigError, ExtractionFailed, MissingTemplate
from geoforge.verbalize import (
    RewriterClient,
    RewriterSettings,
    TemplateBank,
    backtranslate_pairs,
    build_prompt,
    channel_secrecy_violations,
    default_bank,
    describe_equation,
    extract_answer,
    numbers_in,
    rewrite,
    rewrite_many,
    verbalize_problem,
    verbalize_solution,
    verify_answer,
)

RIGHT = (
    "Shape(AB,BC,CA)\n"
    "RightTriangle(ABC)\n"
    "Equal(LengthOfLine(AB),3)\n"
    "image:Equal(LengthOfLine(BC),4)\n"
    "Value(LengthOfLine(AC))"
)


def seg(a, b):
    return QuantitySymbol("LengthOfLine", (a, b))


def test_default_bank_is_complete():
    default_bank().check_total()


def test_missing_template_is_reported():
    bank = TemplateBank.from_dict({"relations": {}, "metrics": {}, "goals": {}, "theorems": {}})
    with pytest.raises(MissingTemplate):
        bank.check_total()


def test_unknown_section_is_a_config_error():
    with pytest.raises(ConfigError):
        TemplateBank.from_dict({"lemmas": {}})


def test_question_mentions_only_text_facts():
    p = problem(RIGHT)
    question = verbalize_problem(p, default_bank(), random.Random(0))
    assert question.startswith("As shown in the figure")
    assert 3.0 in numbers_in(question)
    assert 4.0 not in numbers_in(question)
    assert channel_secrecy_violations(question, p.text_facts, p.image_facts) == []


def test_question_needs_a_goal():
    with pytest.raises(ValueError):
        verbalize_problem(problem("Shape(AB,BC,CA)\nEqual(LengthOfLine(AB),3)"))


def test_solution_ends_with_the_answer():
    result = deduce(problem(RIGHT))
    trace = goal_trace(result)
    text = verbalize_solution(trace, result.goal_status.value, default_bank(), random.Random(0))
    lines = text.splitlines()
    assert len(lines) == len(trace) + 1
    assert lines[-1] == "The answer is 5."
    assert verify_answer(text, 5)


def test_empty_trace_cannot_be_verbalized():
    with pytest.raises(ValueError):
        verbalize_solution([], 5)


def test_describe_equation():
    eq = E.squares([(seg("A", "B"), 1), (seg("B", "C"), 1), (seg("A", "C"), -1)])
    text = describe_equation(eq)
    assert text.count("^2") == 3
    assert " = " in text
    assert describe_equation(E.fixed(seg("A", "B"), Fraction(7))).endswith("= 7")


def test_extract_answer_reads_the_last_number():
    assert extract_answer("AB = 3 and BC = 4, so AC = 5.") == 5.0
    assert extract_answer("The angle is 37.5°.") == 37.5
    assert extract_answer("so x = 3/4") == 0.75
    with pytest.raises(ExtractionFailed):
        extract_answer("no digits here")


def test_point_labels_are_not_numbers():
    assert numbers_in("Point A1 lies on B2C") == []


def test_verify_rejects_unreadable_text():
    assert not verify_answer("the answer is unclear", 5)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.01, max_value=500, allow_nan=False))
def test_verify_accepts_the_printed_answer(value):
    assert verify_answer(f"The answer is {human_value(value)}.", value)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.01, max_value=500, allow_nan=False), st.sampled_from([-1.0, 1.0]))
def test_verify_catches_an_off_by_one(value, delta):
    assert not verify_answer(f"The answer is {human_value(value + delta)}.", value)


def test_secrecy_flags_leaked_image_values():
    p = parse_problem(RIGHT)
    assert channel_secrecy_violations("As shown in the figure, BC = 4.", p.text_facts, p.image_facts) == ["4"]


def test_secrecy_allows_values_the_text_states_too():
    text = (MetricFact("LengthOfLine", ("A", "B"), Fraction(4)),)
    image = (MetricFact("LengthOfLine", ("B", "C"), Fraction(4)),)
    assert channel_secrecy_violations("AB = 4.", text, image) == []


class EchoClient:
    def complete(self, prompt):
        return "Rewritten. The answer is 5."


class BrokenClient:
    def complete(self, prompt):
        raise RuntimeError("offline")


def test_rewrite_falls_back_on_failure():
    assert rewrite("q", "template", BrokenClient()) == ("template", False)
    assert rewrite("q", "template", None) == ("template", False)
    assert rewrite("q", "template", EchoClient()) == ("Rewritten. The answer is 5.", True)


def test_rewrite_many_keeps_order():
    drafts = [(f"q{i}", f"s{i}") for i in range(6)]
    assert rewrite_many(drafts, BrokenClient(), 3) == [(s, False) for _, s in drafts]
    assert rewrite_many(drafts, None) == [(s, False) for _, s in drafts]


class FakeResponse:
    def __init__(self, payload, status=200):
        self.payload = payload
        self.status = status

    def raise_for_status(self):
        if self.status >= 400:
            raise requests.HTTPError(f"status {self.status}")

    def json(self):
        return self.payload


class FakeSession:
    def __init__(self, responses):
        self.responses = list(responses)
        self.calls = []

    def post(self, url, json=None, headers=None, timeout=None):
        self.calls.append((url, json, headers, timeout))
        return self.responses.pop(0)


def test_client_retries_then_succeeds():
    session = FakeSession([FakeResponse({}, 503), FakeResponse({"text": "  done  "})])
    settings = RewriterSettings("http://rewriter.local/v1", "m", "secret", retries=1)
    client = RewriterClient(settings, session)
    assert client.complete("prompt") == "done"
    url, body, headers, _ = session.calls[-1]
    assert url == "http://rewriter.local/v1"
    assert body == {"prompt": "prompt", "model": "m"}
    assert headers["Authorization"] == "Bearer secret"


def test_client_gives_up_after_retries():
    session = FakeSession([FakeResponse({"text": ""}), FakeResponse({"text": ""})])
    client = RewriterClient(RewriterSettings("http://rewriter.local/v1", retries=1), session)
    with pytest.raises(RuntimeError):
        client.complete("prompt")


def test_client_needs_an_endpoint():
    with pytest.raises(ConfigError):
        RewriterClient(RewriterSettings())


def test_api_key_comes_from_the_environment(monkeypatch):
    monkeypatch.setenv("GEOFORGE_REWRITER_KEY", "from-env")
    assert RewriterSettings("http://x").with_env_key().api_key == "from-env"
    assert RewriterSettings("http://x", api_key="given").with_env_key().api_key == "given"


def test_backtranslation_spells_out_every_fact():
    p = parse_problem(RIGHT, "right")
    pairs = backtranslate_pairs([p], default_bank(), random.Random(4), count=2)
    assert [pair["id"] for pair in pairs] == ["right_bt0", "right_bt1"]
    for pair in pairs:
        again = parse_problem(pair["cdl"])
        assert not again.image_facts
        assert len(again.text_facts) == 3
        assert 4.0 in numbers_in(pair["text"])


@pytest.mark.parametrize("value, text", [
    (1234567.5, "1234570"),
    (25000000.5, "25000000"),
    (1.23e-05, "0.0000123"),
    (0.000456789, "0.000456789"),
    (2.5, "2.5"),
])
def test_human_values_never_use_an_exponent(value, text):
    assert human_value(value) == text


@pytest.mark.parametrize("value", [1234567.5, 98765432.25, 1.23e-05, 4.5e-08])
def test_extreme_answers_verify(value):
    result = deduce(problem(RIGHT))
    solution = verbalize_solution(goal_trace(result), value, default_bank(), random.Random(0))
    assert solution.splitlines()[-1] == f"The answer is {human_value(value)}."
    assert "e" not in human_value(value)
    assert verify_answer(solution, value)


def test_exponent_answers_are_read():
    assert verify_answer("The answer is 1.23e-05.", 1.23e-05)
    assert extract_answer("so the area is 1.5E+06") == 1.5e6
    assert extract_answer("AB = 2, so x = 3e2 cm") == 300.0


def test_rewrite_prompt_wording():
    prompt = build_prompt("Find AC.", "AC = 5. The answer is 5.")
    first = prompt.splitlines()[0]
    assert first.startswith("Given a geometry problem and its answer hint, write a answer to the problem.")
    assert "1. Refer to the answer hint, but do not use the information in it as given conditions." in prompt
    assert "2. Only output the solution, without any additional information." in prompt
    assert "Problem\nFind AC.\n" in prompt
    assert prompt.rstrip().endswith("Hint\nAC = 5. The answer is 5.")
