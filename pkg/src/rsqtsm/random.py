"""Seeded random streams.

Every stochastic routine draws from a Philox counter-based bit generator.
Uniforms are built from the top 53 bits of each 64-bit word and shifted by
half an ulp so they live in the open interval (0, 1); standard normals are
the inverse normal CDF of those uniforms. The transform is elementwise, so
a stream drawn in row chunks reproduces the same numbers as one big draw.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

_SCALE = 2.0**-53


def make_stream(seed: int | np.random.Generator | None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(seed))


def uniforms(gen: np.random.Generator, size) -> np.ndarray:
    bits = gen.integers(0, 2**64, size=size, dtype=np.uint64, endpoint=False)
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * _SCALE


def standard_normals(gen: np.random.Generator, size) -> np.ndarray:
    return ndtri(uniforms(gen, size))
