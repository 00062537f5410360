"""Named random substreams derived from a single root seed.

Every stochastic component draws from its own generator, keyed by integers
that identify what the stream is for (locus, parameter point, particle, ...).
Results therefore do not depend on scheduling or worker count, only on the
root seed and the key.
"""

from __future__ import annotations

from typing import Tuple, Union

import numpy as np

SeedLike = Union[int, Tuple[int, ...]]

# stream kinds; first key component after the root seed
SIMULATE = 0
PARTICLE = 1
RESAMPLE = 2
DESIGN = 3
DATASET = 4


def as_key(seed: SeedLike) -> Tuple[int, ...]:
    key = (seed,) if isinstance(seed, int) else tuple(seed)
    if not key or not all(isinstance(k, (int, np.integer)) and k >= 0 for k in key):
        raise ValueError(f"seed key must be nonnegative integers, got {seed!r}")
    return tuple(int(k) for k in key)


def derive(seed: SeedLike, *path: int) -> Tuple[int, ...]:
    """Extend a seed key; the result can seed a generator or be derived further."""
    return as_key(seed) + tuple(int(p) for p in path)


def substream(seed: SeedLike, *path: int) -> np.random.Generator:
    """Generator for the given key, independent across distinct keys."""
    return np.random.default_rng(np.random.SeedSequence(derive(seed, *path)))
