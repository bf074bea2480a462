"""SplitMix64 pseudo random generator with named substreams.

Every experiment draws from three independent streams derived from one
seed so that, for example, extra agent-side draws never shift the
environment noise.
"""
from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

STREAM_ENV = 0
STREAM_AGENT = 1
STREAM_FALLBACK = 2


def mix64(z: int) -> int:
    """SplitMix64 output finalizer applied to an already advanced state."""
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, stream_id: int) -> int:
    """Seed of substream ``stream_id``: the ``stream_id + 1``-th output of SplitMix64(seed)."""
    if stream_id < 0:
        raise ValueError("stream_id must be nonnegative")
    state = seed & MASK64
    out = 0
    for _ in range(stream_id + 1):
        state = (state + GOLDEN_GAMMA) & MASK64
        out = mix64(state)
    return out


class Rng:
    """SplitMix64 generator.

    ``uniform_below`` is unbiased (rejection sampling) and ``uniform_real``
    uses the top 53 bits, so the whole stream is reproducible bit for bit
    across platforms and languages.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int = 0):
        self.state = seed & MASK64

    @classmethod
    def substream(cls, seed: int, stream_id: int) -> Rng:
        return cls(derive_seed(seed, stream_id))

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)

    def uniform_below(self, n: int) -> int:
        if n <= 0:
            raise ValueError(f"uniform_below needs n >= 1, got {n}")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def uniform_real(self) -> float:
        """Uniform float in [0, 1)."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def bernoulli(self, p: float) -> bool:
        return self.uniform_real() < p
