"""Seed derivation shared by every Monte Carlo loop in the package.

Every random draw is keyed by ``(master_seed, stream_id, counter)``.  The key
is turned into a :class:`numpy.random.SeedSequence` whose ``spawn_key`` is the
tuple ``(stream_id, counter)``; SeedSequence hashes entropy and spawn key with
its fixed mixing function, so the resulting PCG64 stream depends only on the
key and never on evaluation order or on how many workers are running.

Streams used internally:

* ``STREAM_F1``, ``STREAM_F2``, ``STREAM_F12`` -- the three free energies of a
  subadditivity report;
* ``STREAM_DEFAULT`` -- a standalone quenched free energy;
* child keys ``0`` (disorder) and ``1`` (state sampling) under each
  realization seed.
"""

from __future__ import annotations

import hashlib
from typing import Union

import numpy as np

SeedLike = Union[int, np.random.SeedSequence]

STREAM_DEFAULT = 0
STREAM_F1 = 1
STREAM_F2 = 2
STREAM_F12 = 3
STREAM_PATHS = 4
STREAM_HAAR = 5

DISORDER = 0
STATES = 1

MASK64 = (1 << 64) - 1


def as_seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, (int, np.integer)):
        return np.random.SeedSequence(int(seed) & MASK64)
    raise TypeError(f"seed must be an int or SeedSequence, got {type(seed).__name__}")


def child(seed: SeedLike, *keys: int) -> np.random.SeedSequence:
    """Deterministic child of ``seed`` addressed by integer ``keys``."""
    ss = as_seed_sequence(seed)
    return np.random.SeedSequence(ss.entropy, spawn_key=tuple(ss.spawn_key) + tuple(int(k) for k in keys))


def realization_seed(master_seed: SeedLike, stream_id: int, counter: int) -> np.random.SeedSequence:
    return child(master_seed, stream_id, counter)


def rng(seed: SeedLike) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(as_seed_sequence(seed)))


def stream_id(name: str) -> int:
    """Stable 32-bit stream id for a string label (blake2b, not ``hash``)."""
    return int.from_bytes(hashlib.blake2b(name.encode(), digest_size=4).digest(), "little")
