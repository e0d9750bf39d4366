from pathlib import Path

import pytest

from geoforge.cdl import parse_problem
from geoforge.pipeline import load_seed_problems

ROOT = Path(__file__).resolve().parent.parent
SEEDS_DIR = ROOT / "fixtures" / "seeds"


def problem(text, problem_id="t"):
    """Parse CDL written with one statement per line."""
    return parse_problem(text, problem_id)


@pytest.fixture(scope="session")
def seed_problems():
    problems, diagnostics = load_seed_problems([SEEDS_DIR])
    assert not diagnostics, diagnostics
    return problems


@pytest.fixture
def seeds_dir():
    return SEEDS_DIR
