"""
Template bank: sentence templates for relations, metrics, goals and theorem steps
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from ..cdl.catalog import QUANTITIES, RELATIONS
from ..engine.deduce import ALGEBRA
from ..engine.theorems import THEOREMS
from ..errors import ConfigError, MissingTemplate

DEFAULT_PATH = Path(__file__).with_name("templates.json")
SECTIONS = ("relations", "metrics", "goals", "theorems")

# slots each section may use; every template must use at least one of `required`
SLOTS = {
    "relations": {"a", "b", "apex", "vertex", "base", "touch"},
    "metrics": {"p", "v", "arc", "center", "shape"},
    "goals": {"p", "arc", "center", "shape"},
    "theorems": {"subject", "conclusion", "equation"},
}
REQUIRED = {
    "relations": {"a"},
    "metrics": {"v"},
    "goals": {"p", "arc", "shape"},
    "theorems": {"conclusion"},
}


def slots_of(template: str) -> set:
    return {name for _, name, _, _ in string.Formatter().parse(template) if name}


@dataclass
class TemplateBank:
    relations: Dict[str, List[str]] = field(default_factory=dict)
    metrics: Dict[str, List[str]] = field(default_factory=dict)
    goals: Dict[str, List[str]] = field(default_factory=dict)
    theorems: Dict[str, List[str]] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "TemplateBank":
        unknown = set(data) - set(SECTIONS)
        if unknown:
            raise ConfigError(f"unknown template sections: {', '.join(sorted(unknown))}")
        return cls(**{s: {k: list(v) for k, v in data.get(s, {}).items()} for s in SECTIONS})

    @classmethod
    def load(cls, path=None, check=True) -> "TemplateBank":
        path = Path(path) if path else DEFAULT_PATH
        with open(path, "r", encoding="utf-8") as f:
            bank = cls.from_dict(json.load(f))
        if check:
            bank.check_total()
        return bank

    def expected_keys(self) -> Dict[str, tuple]:
        return {
            "relations": tuple(RELATIONS),
            "metrics": tuple(QUANTITIES),
            "goals": tuple(QUANTITIES),
            "theorems": tuple(THEOREMS) + ALGEBRA,
        }

    def check_total(self) -> None:
        """Fail on the first missing entry or malformed template."""
        for section, keys in self.expected_keys().items():
            table = getattr(self, section)
            for key in keys:
                if not table.get(key):
                    raise MissingTemplate(f"{section}/{key}")
            for key, variants in table.items():
                for template in variants:
                    names = slots_of(template)
                    if names - SLOTS[section]:
                        raise ConfigError(f"{section}/{key}: unknown slot(s) {sorted(names - SLOTS[section])}")
                    if not names & REQUIRED[section]:
                        raise ConfigError(f"{section}/{key}: template {template!r} fills no argument")

    def variants(self, section: str, key: str) -> List[str]:
        found = getattr(self, section).get(key)
        if not found:
            raise MissingTemplate(key)
        return found

    def choose(self, section: str, key: str, rng=None) -> str:
        """A variant picked by rng; the first variant without one."""
        options = self.variants(section, key)
        return options[0] if rng is None else rng.choice(options)


_DEFAULT: Optional[TemplateBank] = None


def default_bank() -> TemplateBank:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = TemplateBank.load()
    return _DEFAULT
