"""SplitMix64: a tiny, fully specified generator for reproducible sampling.

Outcome sampling in :mod:`overmeasure.premeasurement` and the CLI runs on
this generator so that a given seed yields the same draws on every platform
and every numpy release. Bulk Gaussian draws for property checks use
``numpy.random.default_rng`` instead, seeded from the same integer.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1


class SplitMix64:
    """Steele, Lea and Flood's 64-bit mixing generator.

    The state is a single 64-bit counter; it advances by the golden-ratio
    increment and each output is a bijective mix of the new state.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int) -> None:
        self.state = int(seed) & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform double in ``[0, 1)`` from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def spawn_seed(self) -> int:
        return self.next_u64()
