"""Deterministic random sampling primitives.

Dataset assembly must reproduce bit-for-bit from a seed regardless of the
numpy version installed, so sampling and shuffling here run on SplitMix64,
a fixed 64-bit generator, instead of library RNGs.
"""

from __future__ import annotations

from typing import Sequence, TypeVar

_MASK = (1 << 64) - 1

T = TypeVar("T")


class SplitMix64:
    """SplitMix64 generator (Steele, Lea & Flood's mixing constants)."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) without modulo bias."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def derive(self, stream: int) -> "SplitMix64":
        """Child generator for an independent sub-stream."""
        child = SplitMix64(self._state ^ (0xA076_1D64_78BD_642F * (stream + 1) & _MASK))
        child.next_u64()
        return child


def sample_indices(n: int, k: int, rng: SplitMix64) -> list[int]:
    """k distinct indices from range(n) by partial Fisher-Yates."""
    if k > n:
        raise ValueError(f"cannot sample {k} from {n}")
    pool = list(range(n))
    for i in range(k):
        j = i + rng.below(n - i)
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:k]


def shuffle(items: Sequence[T], rng: SplitMix64) -> list[T]:
    """Full Fisher-Yates shuffle; returns a new list."""
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = rng.below(i + 1)
        out[i], out[j] = out[j], out[i]
    return out
