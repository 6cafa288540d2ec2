"""Seeded random streams.

All randomness goes through numpy's Philox4x64 bit generator, a
counter-based generator whose output is fixed by its 128-bit key. Keys are
derived from a SHA-256 digest of the seed and any stream labels (such as a
trial index), so per-trial streams are independent of execution order and
thread count.
"""
from __future__ import annotations

import hashlib

import numpy as np

RNG_ALGORITHM = "numpy.random.Philox (4x64-10), key = sha256(seed, *stream)[:16]"


def derive_key(seed: int, *stream) -> np.ndarray:
    payload = repr((int(seed),) + tuple(stream)).encode()
    digest = hashlib.sha256(payload).digest()
    return np.frombuffer(digest[:16], dtype="<u8").copy()


def make_rng(seed: int, *stream) -> np.random.Generator:
    """Generator for ``seed`` and an optional stream path such as ``("trial", 7)``."""
    return np.random.Generator(np.random.Philox(key=derive_key(seed, *stream)))
