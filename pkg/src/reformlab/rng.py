"""Seeded randomness shared by every stochastic routine in the package.

All shuffling, sampling, swarm updates, and weight initialization draw from
NumPy's PCG64 bit generator.  PCG64 is a named, versioned algorithm whose
stream for a given seed is identical across platforms and NumPy releases,
so fold plans, swarm trajectories, and network initializations reproduce
bit-for-bit anywhere.
"""
from __future__ import annotations

import numpy as np


def default_rng(seed: int) -> np.random.Generator:
    """Return a PCG64-backed generator for ``seed``."""
    return np.random.Generator(np.random.PCG64(seed))
