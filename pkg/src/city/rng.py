"""
Owned, splittable 64-bit PRNG for procedural generation
"""

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """SplitMix64 generator.

    Every stream is derived from an explicit seed, so results are identical on
    every platform. `split(*key)` derives a child stream from the seed this
    generator was created with, independent of how many values were drawn.
    """

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self.state = self.seed

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return _mix64(self.state)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """Float in [lo, hi) with 53 random bits"""
        return lo + (hi - lo) * ((self.next_u64() >> 11) * (1.0 / (1 << 53)))

    def randint(self, lo: int, hi: int) -> int:
        """Integer in the closed range [lo, hi]"""
        if hi < lo:
            raise ValueError(f"Empty range [{lo}, {hi}]")
        return lo + self.next_u64() % (hi - lo + 1)

    def chance(self, p: float) -> bool:
        return self.uniform() < p

    def split(self, *key: int) -> "SplitMix64":
        h = _mix64(self.seed ^ GOLDEN_GAMMA)
        for k in key:
            h = _mix64((h ^ (k & MASK64)) * GOLDEN_GAMMA & MASK64)
        return SplitMix64(h)
