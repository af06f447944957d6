"""Seeded random number generation.

Scene generation and human behavior must be reproducible from a single integer
seed across platforms and languages, so instead of random.Random (Mersenne
Twister, Python-specific stream for some helpers) we ship a small splitmix64
generator. The algorithm is the public-domain one from Vigna's reference
implementation:

    state += 0x9E3779B97F4A7C15                     (golden gamma)
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D4A12C83E4C77B
    z ^= (z >> 31)

All arithmetic is modulo 2**64. First three outputs for seed 0:
0x191855693109E4AC, 0x47EF269503A9520B, 0x719474675151A6D1 (frozen in tests,
cross-checked against the C reference).

Floats are drawn from the top 53 bits, giving uniforms on [0, 1) with the
usual 2**-53 grid, so every derived draw is a pure function of the seed.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D4A12C83E4C77B


class SplitMix64:
    """Deterministic 64-bit generator; do not substitute random.Random."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        return z ^ (z >> 31)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """Uniform float on [lo, hi). Draws exactly one u64."""
        u = self.next_u64() >> 11  # top 53 bits
        return lo + (hi - lo) * (u * 2.0**-53)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer on [lo, hi], both ends inclusive.

        Uses rejection on the top bits to avoid modulo bias; consumes a
        variable (but seed-determined) number of u64 draws.
        """
        if hi < lo:
            raise ValueError(f"empty randint range [{lo}, {hi}]")
        span = hi - lo + 1
        if span == 1:
            return lo  # no draw consumed
        # smallest power-of-two window >= span, rejection keeps it unbiased
        bits = (span - 1).bit_length()
        while True:
            v = self.next_u64() >> (64 - bits)
            if v < span:
                return lo + v

    def choice(self, seq):
        return seq[self.randint(0, len(seq) - 1)]

    def spawn(self) -> "SplitMix64":
        """Child generator seeded from this one's stream."""
        return SplitMix64(self.next_u64())
