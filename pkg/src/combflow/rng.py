"""Seeded random number streams.

All randomness in the package flows through numpy Generators backed by the
PCG64 bit generator.  A run is identified by a single 64-bit master seed;
independent work units (replicates, chunks, subcommand stages) get their own
streams via SplitMix64 so that results do not depend on how work is batched
or parallelised — only on the (master seed, unit index) pair.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
# Weyl increment from the SplitMix64 reference implementation.
_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(state: int) -> int:
    """One SplitMix64 output step for the given 64-bit state."""
    z = (state + _GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_seed(master: int, index: int) -> int:
    """Derive the seed of work-unit ``index`` from the master seed.

    Two SplitMix64 steps: the first whitens the master seed, the second mixes
    in the index, so neighbouring indices give unrelated streams.
    """
    if index < 0:
        raise ValueError("work-unit index must be nonnegative")
    base = splitmix64(master & _MASK64)
    return splitmix64((base + index * _GAMMA) & _MASK64)


def make_rng(seed: int) -> np.random.Generator:
    """A fresh PCG64 generator for the given 64-bit seed."""
    return np.random.Generator(np.random.PCG64(seed & _MASK64))


def replicate_rng(master: int, index: int) -> np.random.Generator:
    """Generator for replicate ``index`` of a run with the given master seed."""
    return make_rng(derive_seed(master, index))
