"""Deterministic 64-bit random number generator.

Uses the published splitmix64 algorithm (Steele, Lea & Flood; the
reference implementation from the xoshiro project) so that identical
seeds reproduce identical scenario streams on every platform and
Python version. All derived draws (ints, floats, choices, weighted
picks) are defined below in terms of raw 64-bit outputs and are part
of the on-disk compatibility contract -- golden files pin them.
"""

from __future__ import annotations

from typing import Sequence, TypeVar

_MASK64 = (1 << 64) - 1

T = TypeVar("T")


class SplitMix64:
    """splitmix64 stream seeded with an unsigned 64-bit integer."""

    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError("seed must be a non-negative integer")
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] (inclusive), by 64-bit modulo."""
        if hi < lo:
            raise ValueError("empty integer range")
        return lo + self.next_u64() % (hi - lo + 1)

    def choice(self, seq: Sequence[T]) -> T:
        if not seq:
            raise ValueError("cannot choose from an empty sequence")
        return seq[self.next_u64() % len(seq)]

    def weighted_choice(self, items: Sequence[T], weights: Sequence[float]) -> T:
        """Pick by cumulative weight using a single float draw."""
        total = float(sum(weights))
        if total <= 0.0 or len(items) != len(weights):
            raise ValueError("weights must be non-negative with a positive sum")
        x = self.random() * total
        acc = 0.0
        for item, w in zip(items, weights):
            acc += w
            if x < acc:
                return item
        return items[-1]
