"""
Optional solution rewriting through an external text service
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import requests

from ..errors import ConfigError
from ..log import debug_log

API_KEY_ENV = "GEOFORGE_REWRITER_KEY"

REWRITE_PROMPT = (
    "Given a geometry problem and its answer hint, write a answer to the problem. "
    "Ensure the answer is correct, concise, easy to understand, and written with clarity and natural flow.\n"
    "\n"
    "Guidelines\n"
    "1. Refer to the answer hint, but do not use the information in it as given conditions.\n"
    "2. Only output the solution, without any additional information.\n"
    "\n"
    "Problem\n"
    "{problem}\n"
    "\n"
    "Hint\n"
    "{hint}\n"
)


@dataclass(frozen=True)
class RewriterSettings:
    endpoint: Optional[str] = None
    model: str = ""
    api_key: Optional[str] = None
    timeout: float = 30.0
    retries: int = 2
    max_in_flight: int = 4

    def __post_init__(self):
        if self.timeout <= 0:
            raise ConfigError("rewriter timeout must be positive")
        if self.retries < 0 or self.max_in_flight < 1:
            raise ConfigError("rewriter retries must be >= 0 and max_in_flight >= 1")

    @property
    def enabled(self) -> bool:
        return bool(self.endpoint)

    def with_env_key(self) -> "RewriterSettings":
        key = self.api_key or os.environ.get(API_KEY_ENV)
        return RewriterSettings(self.endpoint, self.model, key, self.timeout, self.retries, self.max_in_flight)


def build_prompt(problem: str, hint: str) -> str:
    return REWRITE_PROMPT.format(problem=problem, hint=hint)


class RewriterClient:
    """POSTs {prompt, model} and reads {text} back."""

    def __init__(self, settings: RewriterSettings, session: Optional[requests.Session] = None):
        if not settings.enabled:
            raise ConfigError("rewriter endpoint is not configured")
        self.settings = settings
        self.session = session or requests.Session()

    def _headers(self):
        headers = {"Content-Type": "application/json"}
        if self.settings.api_key:
            headers["Authorization"] = f"Bearer {self.settings.api_key}"
        return headers

    def complete(self, prompt: str) -> str:
        last_error = None
        for attempt in range(self.settings.retries + 1):
            try:
                response = self.session.post(
                    self.settings.endpoint,
                    json={"prompt": prompt, "model": self.settings.model},
                    headers=self._headers(),
                    timeout=self.settings.timeout,
                )
                response.raise_for_status()
                text = response.json()["text"]
                if not isinstance(text, str) or not text.strip():
                    raise ValueError("empty rewrite")
                return text.strip()
            except (requests.RequestException, ValueError, KeyError, TypeError) as e:
                last_error = e
                debug_log(f"Rewriter attempt {attempt + 1} failed: {e}", "DEBUG")
        raise RuntimeError(f"rewriter failed after {self.settings.retries + 1} attempt(s): {last_error}")


def rewrite(question: str, solution: str, client=None) -> Tuple[str, bool]:
    """(text, rewriter_used); any failure falls back to the template solution."""
    if client is None:
        return solution, False
    try:
        return client.complete(build_prompt(question, solution)), True
    except Exception as e:
        debug_log(f"Rewriter fallback to template solution: {e}", "WARN")
        return solution, False


def rewrite_many(drafts: Sequence[Tuple[str, str]], client=None, max_in_flight: int = 4) -> List[Tuple[str, bool]]:
    """Rewrite (question, solution) pairs concurrently; results keep input order."""
    if client is None or not drafts:
        return [(solution, False) for _, solution in drafts]
    with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
        return list(pool.map(lambda d: rewrite(d[0], d[1], client), drafts))
