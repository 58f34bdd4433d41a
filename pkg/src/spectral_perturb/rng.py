"""Counter-based random streams keyed by integer tuples.

A trial is identified by ``(master_seed, *indices)``; its generator depends on
that key alone, so trials can run in any order or in parallel.
"""
from __future__ import annotations

import numpy as np


def trial_seed(master_seed: int, *indices: int) -> int:
    """Derive a 64-bit seed from a master seed and a tuple of indices."""
    ss = np.random.SeedSequence([int(master_seed) & (2**64 - 1), *map(int, indices)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def generator(seed: int, *indices: int) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1), *map(int, indices)])
    return np.random.Generator(np.random.Philox(ss))
