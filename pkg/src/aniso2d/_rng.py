"""Self-contained 64-bit pseudo-random generator for reproducible streams.

The generator is fully specified here so any implementation, in any
language, can reproduce the same streams from the same 64-bit seed:

* **Seeding** — splitmix64: starting from the seed, repeatedly add the
  constant 0x9E3779B97F4A7C15 (mod 2^64); each output is the new state
  passed through the avalanche
  ``z ^= z>>30; z *= 0xBF58476D1CE4E5B9; z ^= z>>27; z *= 0x94D049BB133111EB;
  z ^= z>>31`` (all mod 2^64).  The first four outputs initialize the
  main generator's state.
* **Stream** — xoshiro256++: with state (s0, s1, s2, s3), each step
  returns ``rotl(s0 + s3, 23) + s0`` (mod 2^64) and updates
  ``t = s1 << 17; s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t;
  s3 = rotl(s3, 45)``.
* **Doubles** — the top 53 bits: ``(u64 >> 11) * 2.0**-53``, uniform in
  [0, 1).

Pure integer arithmetic; no dependency on platform RNG state.
"""
from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def splitmix64_stream(seed: int, count: int) -> list[int]:
    """First ``count`` splitmix64 outputs for ``seed``."""
    state = seed & _MASK
    out = []
    for _ in range(count):
        state = (state + _SPLITMIX_GAMMA) & _MASK
        z = state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        z ^= z >> 31
        out.append(z)
    return out


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


class Xoshiro256pp:
    """xoshiro256++ stream seeded through splitmix64."""

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK
        s = splitmix64_stream(self.seed, 4)
        self._s = list(s)

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s0 + s3) & _MASK, 23) + s0) & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def next_double(self) -> float:
        return (self.next_u64() >> 11) * 2.0 ** -53

    def doubles(self, count: int) -> np.ndarray:
        return np.array([self.next_double() for _ in range(count)])

    def uniform(self, lo: float, hi: float, count: int) -> np.ndarray:
        return lo + (hi - lo) * self.doubles(count)

    def integer_below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection on the top 53 bits."""
        if n <= 0:
            raise ValueError("n must be positive")
        span = (1 << 53) - ((1 << 53) % n)
        while True:
            x = self.next_u64() >> 11
            if x < span:
                return x % n
