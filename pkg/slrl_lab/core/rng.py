"""Seeded random streams.

One root seed per run is forked by name into independent streams (env,
policy noise, minibatch sampling, mixup, init) so that adding draws to one
stream never shifts another.
"""

import zlib
from typing import Optional

import numpy as np

from ..exceptions import ContractViolationError


class Rng:
    """A named, reproducible random stream backed by PCG64."""

    def __init__(self, seed: int, stream: str = "root"):
        self.seed = int(seed)
        self.stream = stream
        key = [self.seed & 0xFFFFFFFFFFFFFFFF]
        if stream != "root":
            key.append(zlib.crc32(stream.encode("utf-8")))
        self._gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(key)))

    def fork(self, name: str) -> "Rng":
        """Derive an independent stream; the same (seed, name) always matches."""
        path = name if self.stream == "root" else f"{self.stream}/{name}"
        return Rng(self.seed, path)

    def uniform(self, lo: float, hi: float, size: Optional[int] = None):
        if hi < lo:
            raise ContractViolationError(
                f"uniform bounds reversed: lo={lo}, hi={hi}", {"lo": lo, "hi": hi}
            )
        if size is None:
            return float(self._gen.uniform(lo, hi))
        return self._gen.uniform(lo, hi, size=size)

    def gaussian(self, rows: int, cols: int) -> np.ndarray:
        return self._gen.standard_normal((rows, cols))

    def integers(self, high: int, size: int) -> np.ndarray:
        return self._gen.integers(0, high, size=size)

    def choice(self, options, size: Optional[int] = None):
        idx = self._gen.integers(0, len(options), size=size)
        if size is None:
            return options[int(idx)]
        return [options[i] for i in idx]

    def beta(self, a: float, b: float, size: int) -> np.ndarray:
        return self._gen.beta(a, b, size=size)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed}, stream={self.stream!r})"


def sample_gaussian(rng: Rng, rows: int, cols: int) -> np.ndarray:
    """Standard normal draws as a rows x cols float64 matrix."""
    return rng.gaussian(rows, cols)


def sample_uniform(rng: Rng, lo: float, hi: float) -> float:
    """One uniform draw in [lo, hi]."""
    return rng.uniform(lo, hi)
