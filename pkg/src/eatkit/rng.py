"""Small explicit 64-bit PRNG so every sampled test case is reproducible.

The generator is a splitmix64 recurrence: the state advances by a fixed
odd constant and the output is a bit-mixed copy of the state.  It is not
cryptographic; it only has to make seeded property tests deterministic,
independently of the platform's default RNG.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    __slots__ = ("_state", "_spare")

    def __init__(self, seed: int):
        self._state = int(seed) & _MASK64
        self._spare: float | None = None

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def randrange(self, n: int) -> int:
        """Integer in [0, n). Modulo bias is negligible for test-sized n."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def normal(self) -> float:
        """Standard normal via Box-Muller; pairs are cached."""
        if self._spare is not None:
            z = self._spare
            self._spare = None
            return z
        u1 = 1.0 - self.uniform()  # (0, 1], keeps log() finite
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        self._spare = r * math.sin(2.0 * math.pi * u2)
        return r * math.cos(2.0 * math.pi * u2)

    def complex_normal(self) -> complex:
        return complex(self.normal(), self.normal())


def as_rng(seed: int | SplitMix64) -> SplitMix64:
    """Pass a SplitMix64 through, or build one from an integer seed."""
    if isinstance(seed, SplitMix64):
        return seed
    return SplitMix64(seed)
