"""Deterministic 64-bit generator (SplitMix64).

One tiny generator is shared by weight initialisation, epoch shuffling and
the synthetic-data generator so every artifact is reproducible from a seed
alone, with no dependence on platform RNG libraries.
"""

_MASK64 = (1 << 64) - 1

GOLDEN_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    """SplitMix64 stream; the state advances by the golden gamma per draw."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_unit(self) -> float:
        """Uniform float in [0, 1), 53 random mantissa bits."""
        return (self.next() >> 11) * 2.0**-53
