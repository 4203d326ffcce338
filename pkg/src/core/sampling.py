"""
Weighted discrete sampling and seeded random streams.

Coordinates are drawn with Vose's alias method: O(n) table construction,
O(1) per draw. Every run owns its generators, spawned from one seed.
"""

from typing import NamedTuple

import numpy as np

from core.errors import InvalidInputError

DEFAULT_BLOCK = 4096


class AliasSampler:
    """Alias table over categories 0..n-1 with probability weight_i / sum(weights)."""

    __slots__ = ("n", "weights", "prob", "alias")

    def __init__(self, weights):
        w = np.asarray(weights, dtype=np.float64).ravel()
        if w.size == 0:
            raise InvalidInputError("alias sampler needs at least one weight")
        if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
            raise InvalidInputError("alias sampler weights must be finite and strictly positive")

        self.n = int(w.size)
        self.weights = w.copy()
        self.weights.flags.writeable = False

        scaled = (w * self.n / w.sum()).tolist()
        prob = [1.0] * self.n
        alias = list(range(self.n))

        small = [i for i, p in enumerate(scaled) if p < 1.0]
        large = [i for i, p in enumerate(scaled) if p >= 1.0]
        while small and large:
            s = small.pop()
            g = large.pop()
            prob[s] = scaled[s]
            alias[s] = g
            # (p_g + p_s) - 1 loses less than p_g - (1 - p_s)
            scaled[g] = (scaled[g] + scaled[s]) - 1.0
            if scaled[g] < 1.0:
                small.append(g)
            else:
                large.append(g)
        # Leftovers are 1 up to rounding
        for i in small + large:
            prob[i] = 1.0
            alias[i] = i

        self.prob = np.array(prob, dtype=np.float64)
        self.alias = np.array(alias, dtype=np.int64)

    def sample(self, rng: np.random.Generator) -> int:
        column = int(rng.integers(self.n))
        if rng.random() < self.prob[column]:
            return column
        return int(self.alias[column])

    def sample_many(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Vectorized draw of `size` categories."""
        columns = rng.integers(self.n, size=size)
        coins = rng.random(size)
        return np.where(coins < self.prob[columns], columns, self.alias[columns])

    def probabilities(self) -> np.ndarray:
        """Category probabilities reconstructed from the alias table."""
        out = self.prob.copy()
        np.add.at(out, self.alias, 1.0 - self.prob)
        return out / self.n


def alias_sample(sampler: AliasSampler, rng: np.random.Generator) -> int:
    return sampler.sample(rng)


class CoordinateStream:
    """Pre-draws coordinates in blocks so a run consumes its generator deterministically."""

    __slots__ = ("sampler", "rng", "block", "_buffer", "_pos")

    def __init__(self, sampler: AliasSampler, rng: np.random.Generator, block: int = DEFAULT_BLOCK):
        if block < 1:
            raise InvalidInputError("block size must be positive")
        self.sampler = sampler
        self.rng = rng
        self.block = block
        self._buffer: list[int] = []
        self._pos = 0

    def draw(self) -> int:
        if self._pos >= len(self._buffer):
            self._buffer = self.sampler.sample_many(self.rng, self.block).tolist()
            self._pos = 0
        i = self._buffer[self._pos]
        self._pos += 1
        return i


class RunStreams(NamedTuple):
    coordinates: np.random.Generator
    noise: np.random.Generator
    stopping: np.random.Generator


def make_streams(seed: int) -> RunStreams:
    """Independent PCG64 generators for coordinate choice, noise and the stopping time."""
    children = np.random.SeedSequence(seed).spawn(3)
    return RunStreams(*(np.random.Generator(np.random.PCG64(child)) for child in children))
