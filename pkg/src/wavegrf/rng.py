"""Counter-based random number streams.

Streams are Philox generators keyed by (seed, stream id): any (seed,
stream, position) triple addresses the same numbers on every platform and
run, so independent tasks can draw without coordination and multilevel
estimators can reuse coherent draws.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, stream_id: int = 0) -> np.random.Generator:
    """A deterministic generator for the given (seed, stream id)."""
    if not (0 <= seed < 2**63):
        raise ValueError("seed must be a nonnegative 63-bit integer")
    key = np.array([np.uint64(seed), np.uint64(stream_id & (2**64 - 1))])
    return np.random.Generator(np.random.Philox(key=key))


def standard_normal(seed: int, stream_id: int, shape) -> np.ndarray:
    return stream(seed, stream_id).standard_normal(shape)
