"""Counter-based random number streams with deterministic derivation.

Every random object in this package is driven by a Philox (counter-based)
bit generator keyed through `numpy.random.SeedSequence`.  A replica stream
is derived as SeedSequence((master_seed, replica_index, stream_tag)), so the
same (seed, index) pair yields the same stream on any machine, under any
scheduling, and for either kernel backend.
"""

from __future__ import annotations

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

# Stream tags keep draws for distinct purposes out of each other's streams.
STREAM_RIGHT = 0      # environment sites 0, 1, 2, ...
STREAM_LEFT = 1       # environment sites -1, -2, ...
STREAM_WALK = 2       # walk step uniforms
STREAM_BOOTSTRAP = 3  # resampling in statistical estimators


def bit_generator(*key: int) -> Philox:
    """Philox bit generator keyed by an integer tuple."""
    return Philox(SeedSequence(tuple(int(k) for k in key)))


def generator(*key: int) -> Generator:
    """numpy Generator over :func:`bit_generator`."""
    return Generator(bit_generator(*key))


def replica_generator(master_seed: int, replica_index: int,
                      stream: int = STREAM_WALK) -> Generator:
    """Per-replica stream: hash of (master seed, replica index, stream tag)."""
    return generator(master_seed, replica_index, stream)


def spawn_seeds(master_seed: int, n: int, stream: int = STREAM_BOOTSTRAP) -> np.ndarray:
    """n derived 64-bit seeds, deterministic in (master_seed, stream)."""
    ss = SeedSequence((int(master_seed), int(stream)))
    return ss.generate_state(n, dtype=np.uint64)


def derive_seed(*key: int) -> int:
    """One 64-bit seed hashed from an integer tuple (stable across runs)."""
    ss = SeedSequence(tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
