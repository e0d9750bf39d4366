"""Deterministic random streams named by seed id, attempt and stage."""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field


def _hash_to_u64(text: str) -> int:
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big", signed=False)


@dataclass
class RNGManager:
    """Provides deterministic, named child streams from one global seed."""

    base_seed: int
    _streams: dict[str, random.Random] = field(default_factory=dict, init=False, repr=False)

    def child_seed(self, *parts: object) -> int:
        """Map a stream name (joined parts) to a child seed."""
        name = ":".join(str(p) for p in parts)
        if not name:
            raise ValueError("stream name must be non-empty")
        return _hash_to_u64(f"{self.base_seed}:{name}")

    def fresh(self, *parts: object) -> random.Random:
        """A new generator for the name; the same name always replays identically."""
        return random.Random(self.child_seed(*parts))

    def stream(self, *parts: object) -> random.Random:
        """A persistent generator for the name, shared by later calls."""
        name = ":".join(str(p) for p in parts)
        if name not in self._streams:
            self._streams[name] = self.fresh(*parts)
        return self._streams[name]

    def reset(self) -> None:
        self._streams.clear()
