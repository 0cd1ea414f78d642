"""Seeded random source shared by the Python layer and the compiled kernels.

A splitmix64 generator; the state is a 1-element uint64 array so the same
stream can be advanced from Python wrappers and from inside jitted loops.
"""

from __future__ import annotations

import numpy as np

from . import _kernels

_MASK = (1 << 64) - 1


class Rng:
    def __init__(self, seed: int):
        self.state = np.array([seed & _MASK], dtype=np.uint64)

    def next64(self) -> int:
        return int(_kernels.rng_next(self.state))

    def below(self, m: int) -> int:
        """Uniform integer in [0, m); m >= 1."""
        if m <= 0:
            raise ValueError("m must be positive")
        return int(_kernels.rng_below(self.state, m))

    def bit(self) -> int:
        return self.below(2)

    def spawn(self) -> "Rng":
        """Derive an independent child stream."""
        return Rng(self.next64())
