"""Small shared helpers: deterministic RNG derivation and norms."""

from __future__ import annotations

import math

import numpy as np

__all__ = ["rng_for", "euclid_norm", "sup_norm"]


def rng_for(master_seed, *key):
    """Independent generator derived from a master seed and an integer key path.

    Streams for distinct key paths are statistically independent, so trials
    can run in parallel without sharing generator state.
    """
    ss = np.random.SeedSequence(entropy=int(master_seed),
                                spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(ss)


def euclid_norm(coord):
    return math.sqrt(sum(int(c) * int(c) for c in coord))


def sup_norm(coord):
    return max(abs(int(c)) for c in coord)
