"""Deterministic seed derivation.

Every source of randomness in the toolkit is a numpy Generator obtained
from an explicit integer seed. Child seeds are derived with SeedSequence
spawn keys so that distinct purposes (fold split, model init, scenario
injection, ...) get independent, reproducible streams.
"""

from __future__ import annotations

import numpy as np


def derive_seed(base_seed: int, *keys: int) -> int:
    """Child seed for the given integer key path; stable across runs."""
    ss = np.random.SeedSequence(entropy=int(base_seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def new_rng(seed: int, *keys: int) -> np.random.Generator:
    if keys:
        seed = derive_seed(seed, *keys)
    return np.random.default_rng(int(seed))
