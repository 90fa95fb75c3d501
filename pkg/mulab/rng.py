"""mulab.rng

Seed convention shared by every sampler.

The generator is numpy's Philox4x64 counter-based bit generator keyed by the
128-bit value ``(stream << 64) | value``. Substreams are derived by hashing the
parent stream id together with a label path (BLAKE2b, 8-byte digest), so a
replica's randomness depends only on (base seed, replica index) and never on
worker count or scheduling.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Any, Dict, Union

import numpy as np

_MASK64 = (1 << 64) - 1

GENERATOR_NAME = "numpy.random.Philox"


@dataclass(frozen=True)
class Seed:
    value: int
    stream: int = 0

    def __post_init__(self) -> None:
        if not (0 <= self.value <= _MASK64 and 0 <= self.stream <= _MASK64):
            raise ValueError("seed value and stream must be 64-bit unsigned integers")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=(self.stream << 64) | self.value))

    def substream(self, *path: Union[str, int]) -> "Seed":
        h = hashlib.blake2b(digest_size=8)
        h.update(str(self.stream).encode("ascii"))
        for part in path:
            h.update(b"/")
            h.update(str(part).encode("utf-8"))
        return Seed(self.value, int.from_bytes(h.digest(), "big"))

    def spawn(self, index: int) -> "Seed":
        """Per-replica seed."""
        return self.substream("replica", index)

    def to_dict(self) -> Dict[str, Any]:
        return {"value": self.value, "stream": self.stream}

    def __str__(self) -> str:
        return f"{self.value}:{self.stream}"


def as_seed(seed: Union[Seed, int, str, None]) -> Seed:
    """Accept a Seed, an int, or "value[:stream]"."""
    if isinstance(seed, Seed):
        return seed
    if seed is None:
        return Seed(0)
    if isinstance(seed, int):
        return Seed(seed)
    text = str(seed).strip()
    value, _, stream = text.partition(":")
    return Seed(int(value), int(stream) if stream else 0)
