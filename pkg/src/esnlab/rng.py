"""Seeded pseudo-random streams.

SplitMix64 expands a master seed into independent stream seeds; each stream
is a xoshiro256++ generator. Both algorithms are the public-domain reference
designs by Vigna et al., so draws are reproducible outside Python as well.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
_TWO_POW_MINUS_53 = 1.0 / (1 << 53)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class SplitMix64:
    """SplitMix64 generator, used for seed expansion."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)


class Xoshiro256pp:
    """xoshiro256++ generator.

    The 256-bit state is filled from four consecutive SplitMix64 outputs of
    ``seed`` unless an explicit ``state`` is given.
    """

    def __init__(self, seed: int = 0, state: tuple[int, int, int, int] | None = None):
        if state is None:
            sm = SplitMix64(seed)
            state = tuple(sm.next_u64() for _ in range(4))
        if not any(state):
            raise ValueError("xoshiro256++ state must not be all zero")
        self.s = [int(v) & MASK64 for v in state]

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self.s
        result = (_rotl((s0 + s3) & MASK64, 23) + s0) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.s = [s0, s1, s2, s3]
        return result

    def random(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * _TWO_POW_MINUS_53

    def random_array(self, n: int) -> np.ndarray:
        """``n`` consecutive uniforms in [0, 1) as a float64 array."""
        # Inlined copy of next_u64; this loop dominates ESN construction time.
        s0, s1, s2, s3 = self.s
        out = [0] * n
        for i in range(n):
            x = (s0 + s3) & MASK64
            out[i] = ((((x << 23) | (x >> 41)) & MASK64) + s0) & MASK64
            t = (s1 << 17) & MASK64
            s2 ^= s0
            s3 ^= s1
            s1 ^= s2
            s0 ^= s3
            s2 ^= t
            s3 = ((s3 << 45) | (s3 >> 19)) & MASK64
        self.s = [s0, s1, s2, s3]
        bits = np.array(out, dtype=np.uint64) >> np.uint64(11)
        return bits.astype(np.float64) * _TWO_POW_MINUS_53

    def uniform_array(self, half_width: float, n: int) -> np.ndarray:
        """``n`` draws from U[-half_width, half_width)."""
        return half_width * (2.0 * self.random_array(n) - 1.0)


def stream_seeds(master_seed: int, count: int) -> list[int]:
    """Expand ``master_seed`` into ``count`` stream seeds."""
    sm = SplitMix64(master_seed)
    return [sm.next_u64() for _ in range(count)]


def streams(master_seed: int, count: int) -> list[Xoshiro256pp]:
    return [Xoshiro256pp(s) for s in stream_seeds(master_seed, count)]
