"""Counter-based random streams, one per (path, channel).

Streams are Philox generators keyed by (seed, path index) with channels
separated by counter jumps, so path j draws the same numbers no matter how
paths are scheduled across workers.
"""

from __future__ import annotations

from math import log

import numpy as np

_MASK64 = (1 << 64) - 1


def path_bitgen(seed: int, path_index: int) -> np.random.Philox:
    key = ((int(path_index) & _MASK64) << 64) | (int(seed) & _MASK64)
    return np.random.Philox(key=key)


def stream(seed: int, path_index: int, channel: int) -> np.random.Generator:
    """Independent generator for one (path, channel) pair."""
    return np.random.Generator(path_bitgen(seed, path_index).jumped(channel))


class BufferedStream:
    """Amortizes per-draw overhead for scalar-heavy event loops."""

    __slots__ = ("_gen", "_size", "_u", "_iu", "_n", "_in")

    def __init__(self, gen: np.random.Generator, size: int = 256):
        self._gen = gen
        self._size = size
        self._u = gen.random(size)
        self._iu = 0
        self._n = None
        self._in = 0

    def uniform(self) -> float:
        i = self._iu
        if i == self._size:
            self._u = self._gen.random(self._size)
            i = 0
        self._iu = i + 1
        return self._u[i]

    def exponential(self) -> float:
        return -log(1.0 - self.uniform())

    def normal(self) -> float:
        if self._n is None or self._in == self._size:
            self._n = self._gen.standard_normal(self._size)
            self._in = 0
        v = self._n[self._in]
        self._in += 1
        return v
