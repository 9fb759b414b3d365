"""Seeded randomness.

Every random draw in the package comes from a NumPy ``Generator`` backed by
the PCG64 bit generator, seeded through ``SeedSequence`` with a single
unsigned 64-bit integer. PCG64 output is specified bit-for-bit and does not
depend on the platform.

Derived seeds are the first 8 bytes (little endian) of the BLAKE2b digest of
the ``"|"``-joined string forms of the seed components, see `hash64`.
"""

from __future__ import annotations

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & MASK64))


def hash64(*parts) -> int:
    """Platform-independent 64-bit hash of ``parts``.

    >>> hash64(0, "pb", "PR", "s_f=0.9", 3) == hash64(0, "pb", "PR", "s_f=0.9", 3)
    True
    """
    text = "|".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(text, digest_size=8).digest(), "little")

