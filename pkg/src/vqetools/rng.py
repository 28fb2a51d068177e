"""Deterministic random-number streams.

All randomness in this package flows through PCG64 generators created by
:func:`stream`. Independent sub-streams for parallel or repeated tasks are
derived from ``(seed, *key)`` via ``numpy.random.SeedSequence``, so results
are reproducible bit-for-bit from a single integer seed plus task indices.
"""

from __future__ import annotations

import numpy as np

# Default seed used by the command-line interface when none is given.
DEFAULT_SEED = 1729


def stream(seed: int, *key: int) -> np.random.Generator:
    """Return a PCG64 generator derived from an integer seed and a task key.

    Distinct keys give statistically independent streams; the same
    (seed, key) always gives the same stream.
    """
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be a non-negative integer")
    entropy = [seed] + [int(k) for k in key]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def child_seed(seed: int, *key: int) -> int:
    """Derive a new integer seed from (seed, key), for APIs that take seeds."""
    seq = np.random.SeedSequence([int(seed)] + [int(k) for k in key])
    return int(seq.generate_state(1, np.uint64)[0])
