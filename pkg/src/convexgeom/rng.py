"""Deterministic random-stream management.

All randomness in the package flows from a single 64-bit seed.  Named
sub-streams are derived by hashing string keys into a
``numpy.random.SeedSequence`` spawn, so any operation gets a
reproducible generator independent of call order.  Monte-Carlo loops
consume fixed-size chunks reduced in chunk order, which keeps results
bit-reproducible regardless of how chunks are scheduled.
"""

from __future__ import annotations

import hashlib
import os

import numpy as np

DEFAULT_SEED = 42
CHUNK = 1 << 16


def _key_to_ints(key: str) -> list[int]:
    digest = hashlib.sha256(key.encode()).digest()
    return [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4)]


def substream(seed: int, *keys: str) -> np.random.Generator:
    """Generator for the sub-stream identified by ``keys`` under ``seed``."""
    entropy = [int(seed)]
    for k in keys:
        entropy.extend(_key_to_ints(str(k)))
    return np.random.default_rng(np.random.SeedSequence(entropy))


def thread_count() -> int:
    """Worker count, controlled by the CONVEXGEOM_THREADS variable."""
    try:
        return max(1, int(os.environ.get("CONVEXGEOM_THREADS", "1")))
    except ValueError:
        return 1


def chunked(total: int, chunk: int = CHUNK):
    """Yield chunk sizes covering ``total`` samples in fixed order."""
    done = 0
    while done < total:
        size = min(chunk, total - done)
        yield size
        done += size
