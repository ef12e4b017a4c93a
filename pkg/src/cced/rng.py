"""Reproducible random streams.

Every randomized stage draws from an ``RngStream`` keyed by (seed,
stream_id), so campaign results do not depend on execution order or on
how trials are spread over workers: trial i always sees the stream
(campaign_seed, i), tree t always sees (forest_seed, t), and so on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def derive_seed(seed: int, *path: int) -> int:
    """Derive a child seed from a root seed and an integer path.

    Used to give each pipeline stage (training, campaign, forest, ...)
    its own independent seed from the single configured one.
    """
    ss = np.random.SeedSequence((seed, *path))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass
class RngStream:
    """A deterministic random stream identified by (seed, stream_id)."""

    seed: int
    stream_id: int = 0
    _gen: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        ss = np.random.SeedSequence((self.seed, self.stream_id))
        self._gen = np.random.Generator(np.random.PCG64(ss))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def integers(self, high: int, size=None):
        """Uniform integers in [0, high)."""
        return self._gen.integers(0, high, size=size)

    def uniform(self, low: float, high: float, size=None):
        return self._gen.uniform(low, high, size=size)

    def normal(self, size=None):
        return self._gen.normal(size=size)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)
