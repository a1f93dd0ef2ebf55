"""
Seeded pseudo-randomness.

All streams come from numpy's PCG64 bit generator (a 128-bit permuted
congruential generator with an xorshift/rotate output function) seeded through
``SeedSequence``. Both are specified independently of platform, so a seed maps
to the same stream everywhere numpy runs. Substreams for (split, class, index)
style keys are derived with ``SeedSequence(seed, spawn_key=key)`` and never
overlap with the parent stream.
"""
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from core.errors import ParameterError

Size = Optional[Union[int, Tuple[int, ...]]]


class RngState:
    """Single-owner random state. Do not share one instance between threads."""

    def __init__(self, seed: int, spawn_key: Sequence[int] = ()):
        if seed < 0 or seed >= 2**64:
            raise ParameterError(f"Seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = int(seed)
        self.spawn_key = tuple(int(k) for k in spawn_key)
        self.generator = np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=self.spawn_key)))

    def substream(self, *key: int) -> "RngState":
        """Independent stream for ``key``, derived from the seed (not from draws already made)."""
        return RngState(self.seed, self.spawn_key + tuple(key))

    def uniform(self, size: Size = None):
        return self.generator.random(size)

    def normal(self, mu: float = 0.0, sigma: float = 1.0, size: Size = None):
        if sigma < 0:
            raise ParameterError(f"sigma must be non-negative, got {sigma}")
        return self.generator.normal(mu, sigma, size)

    def bernoulli(self, p: float, size: Size = None):
        if not 0.0 <= p <= 1.0:
            raise ParameterError(f"Bernoulli probability must lie in [0, 1], got {p}")
        draws = self.generator.random(size) < p
        if size is None:
            return int(draws)
        return draws.astype(np.int8)

    def integers(self, low: int, high: int, size: Size = None):
        return self.generator.integers(low, high, size)

    def permutation(self, n: int) -> np.ndarray:
        return self.generator.permutation(n)


def seeded_rng(seed: int) -> RngState:
    return RngState(seed)


def rng_uniform(state: RngState) -> float:
    return float(state.uniform())


def rng_normal(state: RngState, mu: float, sigma: float) -> float:
    return float(state.normal(mu, sigma))


def rng_bernoulli(state: RngState, p: float) -> int:
    return state.bernoulli(p)
