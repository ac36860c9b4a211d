"""Seeded, splittable random streams.

Draw ``i`` of any batch is produced by block ``i // BLOCK`` whose generator is
``PCG64DXSM(SeedSequence(seed, spawn_key=(stream, block)))``.  Blocks are
always generated in full and then cut, so a value depends only on
``(seed, stream, i)``: neither ``n`` nor the worker count changes it.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

SAMPLER_STREAM = 0
PATH_STREAM = 1
SAMPLE_BLOCK = 1 << 16
PATH_BLOCK = 1 << 12


def block_generator(seed: int, block: int, stream: int = SAMPLER_STREAM) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream), int(block)))
    return np.random.Generator(np.random.PCG64DXSM(ss))


def worker_count() -> int:
    """Worker threads allowed, capped by ``PK_LEVY_THREADS``."""
    cpus = os.cpu_count() or 1
    raw = os.environ.get("PK_LEVY_THREADS")
    if raw:
        try:
            return max(1, min(cpus, int(raw)))
        except ValueError:
            pass
    return cpus


def map_blocks(fn, n_blocks: int) -> list:
    """Apply ``fn(block)`` to every block index, in order, possibly in threads."""
    workers = min(worker_count(), n_blocks)
    if workers <= 1:
        return [fn(b) for b in range(n_blocks)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n_blocks)))
