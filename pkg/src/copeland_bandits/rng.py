"""Seedable 64-bit random number generation.

The repository-wide generator is **xoshiro256++** seeded through the
SplitMix64 finalizer (the initialisation recommended by its authors).  The
compiled kernels implement exactly the same algorithm, so a trace produced
with a given seed is bit-for-bit identical across backends and across
versions of this package.
"""
from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(state: int) -> tuple[int, int]:
    """One SplitMix64 step: returns (new_state, output)."""
    state = (state + _GOLDEN) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def derive_seed(master_seed: int, index: int) -> int:
    """Derive the seed for replicate `index` from a master seed.

    Defined as the second SplitMix64 output of the state
    ``master_seed + (index + 1) * 0x9E3779B97F4A7C15 (mod 2^64)``.
    """
    state = (master_seed + (index + 1) * _GOLDEN) & _MASK64
    state, _ = _splitmix64(state)
    _, out = _splitmix64(state)
    return out


class Xoshiro256pp:
    """xoshiro256++ generator; 64-bit outputs, 256-bit state."""

    __slots__ = ("s0", "s1", "s2", "s3")

    def __init__(self, seed: int):
        state = seed & _MASK64
        state, self.s0 = _splitmix64(state)
        state, self.s1 = _splitmix64(state)
        state, self.s2 = _splitmix64(state)
        _, self.s3 = _splitmix64(state)

    def next_uint64(self) -> int:
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        x = (s0 + s3) & _MASK64
        result = ((x << 23 | x >> 41) + s0) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = (s3 << 45 | s3 >> 19) & _MASK64
        self.s0, self.s1, self.s2, self.s3 = s0, s1, s2, s3
        return result

    def next_double(self) -> float:
        """Uniform double in [0, 1): top 53 bits of one output."""
        return (self.next_uint64() >> 11) * (2.0**-53)

    def next_below(self, n: int) -> int:
        """Uniform-ish integer in [0, n) via floor(u * n); one draw.

        The floor construction has O(n / 2^53) bias, negligible here, and is
        reproduced exactly by the compiled kernels.
        """
        k = int(self.next_double() * n)
        return n - 1 if k >= n else k

    def state(self) -> tuple[int, int, int, int]:
        return (self.s0, self.s1, self.s2, self.s3)
