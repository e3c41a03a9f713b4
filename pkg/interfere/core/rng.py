"""Seed derivation for reproducible, thread-count independent simulations.

Every random draw in interfere comes from a numpy ``Generator`` backed by
the counter-based ``Philox`` bit generator. Its 64-bit key is derived from
the user seed and a path of integers (stream tag, replicate index, ...)
with splitmix64 mixing:

    key = mix(mix(mix(seed) ^ stream) ^ index) ...

so replicate ``r`` always sees the same stream no matter how replicates
are scheduled across threads.
"""

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF

# Stream tags
STREAM_ALPHA = 2
STREAM_ASSIGNMENT = 3
STREAM_DIAGNOSTIC = 4
STREAM_SAMPLING = 5


def splitmix64(x: int) -> int:
    """One splitmix64 output step for state ``x``"""
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *path: int) -> int:
    """Fold ``path`` into ``seed``; returns a 64-bit key"""
    key = splitmix64(int(seed) & MASK64)
    for part in path:
        key = splitmix64(key ^ (int(part) & MASK64))
    return key


def make_rng(seed: int, *path: int) -> np.random.Generator:
    """Generator for the stream identified by ``(seed, *path)``"""
    return np.random.Generator(np.random.Philox(key=derive_seed(seed, *path)))


def int_seed(seed: int, *path: int) -> int:
    """Derived seed folded to 32 bits, for libraries that take a plain int seed"""
    return derive_seed(seed, *path) & 0xFFFFFFFF
