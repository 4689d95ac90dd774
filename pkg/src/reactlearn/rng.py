"""Seeded, splittable random-number streams.

Every stochastic operation in this package draws from an :class:`RngStream`,
which wraps numpy's PCG64 generator keyed by a 64-bit seed plus an integer
path. Children derived via :meth:`RngStream.child` are statistically
independent and depend only on (seed, path), never on draw order or
scheduling, so parallel and sequential execution produce identical results.
"""

from __future__ import annotations

import numpy as np


class RngStream:
    """A deterministic random stream identified by a seed and a child path."""

    __slots__ = ("seed", "path", "_generator")

    def __init__(self, seed: int, path: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.path = tuple(int(p) for p in path)
        self._generator = None

    @property
    def generator(self) -> np.random.Generator:
        """The underlying numpy generator (created lazily)."""
        if self._generator is None:
            seq = np.random.SeedSequence(self.seed, spawn_key=self.path)
            self._generator = np.random.Generator(np.random.PCG64(seq))
        return self._generator

    def child(self, *indices: int) -> "RngStream":
        """Derive an independent sub-stream at the given path extension."""
        return RngStream(self.seed, self.path + indices)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, path={self.path})"
