"""Deterministic seed derivation so every run is replayable byte-for-byte.

All randomness in the package flows through numpy's PCG64 generator. Child
seeds are derived from a root seed plus an integer path (leg index, trial
index, ...) via SeedSequence, which keeps independent streams statistically
sound and exactly reproducible.
"""

from __future__ import annotations

import numpy as np

# Recorded in experiment manifests so results name their generator.
RNG_ALGORITHM = "PCG64"


def derive_seed(root: int, *path: int) -> int:
    """Derive a 64-bit child seed from a root seed and an index path."""
    ss = np.random.SeedSequence(entropy=int(root), spawn_key=tuple(int(i) for i in path))
    return int(ss.generate_state(1, np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))
