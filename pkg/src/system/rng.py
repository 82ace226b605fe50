"""
Reproducible random streams.

Every (seed, grid point, replication) triple maps to its own PCG64
stream through numpy's SeedSequence spawn keys, so sweeps can run in
any order or in parallel and still draw the same numbers.
"""

import numpy as np


def stream_seed(seed: int, point: int = 0, replication: int = 0) -> np.random.SeedSequence:
    """Seed sequence for one replication of one grid point."""
    return np.random.SeedSequence(entropy=seed, spawn_key=(point, replication))


class SlotRng:
    """
    Uniform draws for the slot loop.

    Pulls uniforms from a numpy Generator in blocks and hands them out one
    at a time; the sequence of values is a pure function of the stream.
    """

    BLOCK_SIZE = 8192

    def __init__(self, generator: np.random.Generator, block_size: int = BLOCK_SIZE):
        self._generator = generator
        self._block_size = block_size
        self._buffer: list[float] = []
        self._pos = 0
        self.draws = 0

    @classmethod
    def for_stream(cls, seed: int, point: int = 0, replication: int = 0) -> "SlotRng":
        bit_generator = np.random.PCG64(stream_seed(seed, point, replication))
        return cls(np.random.Generator(bit_generator))

    def uniform(self) -> float:
        """Next uniform in [0, 1)."""
        if self._pos >= len(self._buffer):
            self._buffer = self._generator.random(self._block_size).tolist()
            self._pos = 0
        value = self._buffer[self._pos]
        self._pos += 1
        self.draws += 1
        return value

    def bernoulli(self, p: float) -> int:
        """One Bernoulli(p) draw consuming exactly one uniform."""
        return 1 if self.uniform() < p else 0
