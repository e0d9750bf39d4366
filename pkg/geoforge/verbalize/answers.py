"""
Answer extraction and verification against the engine's value
"""

from __future__ import annotations

import math
import re
from typing import List, Sequence

from ..cdl.facts import MetricFact
from ..cdl.printer import human_value
from ..errors import ExtractionFailed

ABS_TOL = 1e-4
REL_TOL = 1e-3

# a number not glued to a point label, optionally with an exponent, optionally a/b,
# optionally followed by a degree sign
NUMBER_RE = re.compile(
    r"(?<![A-Za-z0-9.])(-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)(?:\s*/\s*(\d+(?:\.\d+)?))?\s*°?"
)


def numbers_in(text: str) -> List[float]:
    out = []
    for m in NUMBER_RE.finditer(text):
        value = float(m.group(1))
        if m.group(2) is not None:
            den = float(m.group(2))
            if den == 0:
                continue
            value /= den
        out.append(value)
    return out


def extract_answer(text: str) -> float:
    """The last numeric token of a solution text."""
    found = numbers_in(text or "")
    if not found:
        raise ExtractionFailed(f"no numeric answer in {text[-60:]!r}" if text else "empty solution text")
    return found[-1]


def answer_tolerance(expected: float) -> float:
    return max(ABS_TOL, REL_TOL * abs(expected))


def verify_answer(text: str, expected) -> bool:
    expected = float(expected)
    if not math.isfinite(expected):
        raise ValueError("expected answer must be finite")
    try:
        got = extract_answer(text)
    except ExtractionFailed:
        return False
    return abs(got - expected) <= answer_tolerance(expected)


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= answer_tolerance(b)


def channel_secrecy_violations(question: str, text_facts: Sequence, image_facts: Sequence) -> List[str]:
    """Image-channel values that show up in the question text, unless a
    text-channel fact states the same number."""
    stated = [float(f.value) for f in text_facts if isinstance(f, MetricFact)]
    seen = numbers_in(question)
    leaks = []
    for fact in image_facts:
        if not isinstance(fact, MetricFact):
            continue
        value = float(fact.value)
        if any(_close(value, s) for s in stated):
            continue
        if any(_close(n, value) for n in seen):
            leaks.append(human_value(fact.value))
    return leaks
