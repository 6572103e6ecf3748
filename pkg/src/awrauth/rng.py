"""Deterministic counter-based random streams.

Every sampling component derives its randomness from a Philox generator
keyed by (seed, stream index), so results are reproducible regardless of
chunking or scheduling and independent streams never overlap.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def philox_stream(seed: int, stream: int) -> np.random.Generator:
    key = np.array([seed & _MASK64, stream & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
