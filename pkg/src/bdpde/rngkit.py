"""Deterministic splittable random streams.

Every source of randomness in a run is drawn from a stream derived from the
master seed by a counter-based key, so results do not depend on the order in
which workers consume randomness.
"""

from __future__ import annotations

import numpy as np

# Purpose ids for the streams a solver run consumes.
INIT_SAMPLING = 1
BIRTHS = 2
DIFFUSION = 3
ANNIHILATION = 4
RESAMPLE = 5

_MASK16 = (1 << 16) - 1
_MASK32 = (1 << 32) - 1


def split(seed: int, purpose: int, chunk: int = 0, step: int = 0) -> np.random.Generator:
    """Derive an independent random stream from (seed, purpose, chunk, step).

    The derivation is purely arithmetic on the Philox key, so streams can be
    created in any order (or concurrently) and the same tuple always yields
    the identical sequence.
    """
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    stream_id = ((purpose & _MASK16) << 48) | ((step & _MASK32) << 16) | (chunk & _MASK16)
    key = np.array([seed, stream_id], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
