"""
Run configuration: defaults, optional YAML file and validation
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import yaml

from .engine.deduce import DeductionBudget
from .errors import ConfigError
from .layout.optimize import LayoutConfig
from .verbalize.rewriter import RewriterSettings

DEFAULT_PER_SEED = 12
DEFAULT_SEED = 42
DEFAULT_IMAGE_RATIO = 0.5
DEFAULT_SIZES = (112, 224, 336)
DEFAULT_OUT = "out"


@dataclass(frozen=True)
class PipelineConfig:
    seeds: Tuple[str, ...] = ()
    out: str = DEFAULT_OUT
    per_seed: int = DEFAULT_PER_SEED
    seed: int = DEFAULT_SEED
    image_ratio: float = DEFAULT_IMAGE_RATIO
    sizes: Tuple[int, ...] = DEFAULT_SIZES
    workers: int = 1
    budget: DeductionBudget = field(default_factory=DeductionBudget)
    layout: LayoutConfig = field(default_factory=LayoutConfig)
    rewriter: RewriterSettings = field(default_factory=RewriterSettings)
    templates: Optional[str] = None
    dump_trace: bool = False
    dump_layout: bool = False
    keep_svg: bool = False
    resume: bool = False

    def validate(self, check_paths: bool = True) -> "PipelineConfig":
        if self.per_seed < 1:
            raise ConfigError(f"per_seed must be at least 1, got {self.per_seed}")
        if not self.sizes or not set(self.sizes) <= set(DEFAULT_SIZES):
            raise ConfigError(f"sizes must be a non-empty subset of {DEFAULT_SIZES}, got {self.sizes}")
        if not 0.0 <= self.image_ratio <= 1.0:
            raise ConfigError(f"image_ratio must lie in [0, 1], got {self.image_ratio}")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if check_paths:
            if not self.seeds:
                raise ConfigError("no seed paths given")
            missing = [s for s in self.seeds if not Path(s).exists()]
            if missing:
                raise ConfigError(f"seed path(s) not found: {', '.join(missing)}")
            if self.templates and not Path(self.templates).is_file():
                raise ConfigError(f"template bank not found: {self.templates}")
        return self

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["seeds"] = list(self.seeds)
        data["sizes"] = list(self.sizes)
        data["rewriter"].pop("api_key", None)
        return data

    def merged(self, **overrides) -> "PipelineConfig":
        """Copy with every override that is not None."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


_NESTED = {"budget": DeductionBudget, "layout": LayoutConfig, "rewriter": RewriterSettings}


def _section(cls, payload, name):
    if payload is None:
        return cls()
    if not isinstance(payload, dict):
        raise ConfigError(f"config section {name!r} must be a mapping")
    known = {f.name for f in fields(cls)}
    unknown = set(payload) - known
    if unknown:
        raise ConfigError(f"unknown keys in {name!r}: {', '.join(sorted(unknown))}")
    try:
        return cls(**payload)
    except TypeError as e:
        raise ConfigError(f"bad {name!r} section: {e}") from e


def config_from_dict(payload: Dict[str, Any]) -> PipelineConfig:
    payload = dict(payload or {})
    known = {f.name for f in fields(PipelineConfig)}
    unknown = set(payload) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for name, cls in _NESTED.items():
        payload[name] = _section(cls, payload.get(name), name)
    for name in ("seeds", "sizes"):
        if name in payload:
            value = payload[name]
            payload[name] = tuple(value) if isinstance(value, (list, tuple)) else (value,)
    try:
        return PipelineConfig(**payload)
    except TypeError as e:
        raise ConfigError(str(e)) from e


def load_config(path) -> PipelineConfig:
    path = Path(path)
    try:
        payload = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    if not isinstance(payload, dict):
        raise ConfigError(f"config {path} must hold a mapping")
    return config_from_dict(payload)
