"""
Exception hierarchy and the rejection value used by synthesis and layout
"""

from dataclasses import dataclass
from typing import Optional


class GeoForgeError(Exception):
    """Base class for every error raised by geoforge."""


class CDLError(GeoForgeError):
    """A statement could not be turned into a fact."""

    def __init__(self, reason, line=None, text=None):
        self.reason = reason
        self.line = line
        self.text = text
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{reason}")


class CDLSyntaxError(CDLError):
    pass


class UnknownPredicate(CDLError):
    def __init__(self, name, line=None, text=None):
        self.name = name
        super().__init__(f"unknown predicate {name!r}", line, text)


class ArityMismatch(CDLError):
    def __init__(self, name, expected, got, line=None, text=None):
        self.name = name
        self.expected = expected
        self.got = got
        super().__init__(f"{name} expects {expected}, got {got}", line, text)


class InconsistentFacts(GeoForgeError):
    """Two determinations of one quantity disagree, or a value is impossible."""

    def __init__(self, message, symbol=None, values=()):
        self.symbol = symbol
        self.values = tuple(values)
        super().__init__(message)


class SeedExhausted(GeoForgeError):
    """The seed closure holds no metric beyond the statement metrics."""


class NoGoalAvailable(GeoForgeError):
    """Every closure symbol is already stated."""


class UnmappablePredicate(GeoForgeError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"no constraint mapping for {name!r}")


class AnnotationOverflow(GeoForgeError):
    def __init__(self, labels):
        self.labels = tuple(labels)
        super().__init__(f"{len(self.labels)} label(s) could not be placed inside the canvas")


class MissingTemplate(GeoForgeError):
    def __init__(self, key):
        self.key = key
        super().__init__(f"no template for {key!r}")


class ExtractionFailed(GeoForgeError):
    """No numeric answer could be read from a solution text."""


class ConfigError(GeoForgeError):
    pass


@dataclass(frozen=True)
class Rejected:
    """A candidate or layout that was refused, with the reason counted in run stats."""

    reason: str
    detail: str = ""
    best_loss: Optional[float] = None

    def __bool__(self):
        return False
