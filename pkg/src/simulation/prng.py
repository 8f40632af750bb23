"""
SplitMix64: the seeded generator behind random demands and random payloads.

    state += 0x9E3779B97F4A7C15
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z ^= z >> 31

All arithmetic is mod 2^64, so two implementations fed the same seed agree.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB


class SplitMix64:
    def __init__(self, seed: int = 0):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * MIX1) & MASK64
        z = ((z ^ (z >> 27)) * MIX2) & MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Draw in [0, bound) as next() mod bound."""
        if bound < 1:
            raise ValueError(f"bound must be positive, got {bound}")
        return self.next() % bound

    def words(self, count: int) -> np.ndarray:
        """`count` successive outputs, vectorized; advances the state the same way."""
        with np.errstate(over="ignore"):
            steps = np.arange(1, count + 1, dtype=np.uint64)
            z = np.uint64(self.state) + steps * np.uint64(GAMMA)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
            z = z ^ (z >> np.uint64(31))
        self.state = (self.state + count * GAMMA) & MASK64
        return z

    def bytes(self, length: int) -> bytes:
        """Little-endian bytes of successive outputs, truncated to `length`."""
        count = -(-length // 8)
        return self.words(count).astype("<u8").tobytes()[:length]
