"""Deterministic sub-seed derivation for chunked, worker-parallel campaigns.

Both fuzz campaigns draw from CPython's ``random.Random`` (MT19937). The
iteration space is split into fixed-size chunks and every chunk gets its own
generator seeded from (master seed, stream label, chunk index) through
SHA-256. A run partitioned across workers therefore merges to exactly the
same stream as a single-threaded run, chunk by chunk.
"""

from __future__ import annotations

import hashlib
import random

GENERATOR_NAME = "mt19937-cpython-random/sha256-chunk-seeds"

# Iterations per RNG chunk. Part of the reproducibility contract: changing it
# changes every derived stream.
CHUNK_SIZE = 1024


def derive_seed(master_seed: int, stream: str, chunk_index: int) -> int:
    digest = hashlib.sha256(f"{master_seed}:{stream}:{chunk_index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def chunk_rng(master_seed: int, stream: str, chunk_index: int) -> random.Random:
    return random.Random(derive_seed(master_seed, stream, chunk_index))


def chunk_ranges(iterations: int):
    """Yield (chunk_index, start, stop) covering range(iterations)."""
    start = 0
    index = 0
    while start < iterations:
        stop = min(start + CHUNK_SIZE, iterations)
        yield index, start, stop
        index += 1
        start = stop
