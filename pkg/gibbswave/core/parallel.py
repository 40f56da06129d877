"""
Deterministic fan-out over sample batches.

Chunk boundaries depend only on the array length, never on the thread count,
so every sample is processed inside the same batch composition whatever
``--threads`` says. Results are stitched back in index order.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List

import numpy as np
import psutil

from gibbswave.core.logger import log

CHUNK_SIZE = 1024


def resolve_threads(threads: int) -> int:
    """
    0 -> number of physical cores (psutil), falling back to os.cpu_count().
    """
    if threads < 0:
        raise ValueError(f"threads must be >= 0, got {threads}")
    if threads > 0:
        return threads
    count = None
    try:
        count = psutil.cpu_count(logical=False)
    except Exception as e:
        log.debug("psutil.cpu_count failed: %s", e)
    return max(1, count or os.cpu_count() or 1)


def chunk_slices(length: int, chunk_size: int = CHUNK_SIZE) -> List[slice]:
    return [slice(start, min(start + chunk_size, length)) for start in range(0, length, chunk_size)]


def map_chunks(
    fn: Callable[[np.ndarray], np.ndarray],
    array: np.ndarray,
    threads: int = 1,
    chunk_size: int = CHUNK_SIZE,
) -> np.ndarray:
    """
    Apply ``fn`` to fixed-size slices of ``array`` along axis 0 and concatenate.

    ``fn`` must map a batch of shape (k, ...) to an array whose leading axis is k.
    """
    slices = chunk_slices(len(array), chunk_size)
    if not slices:
        return fn(array)
    workers = min(resolve_threads(threads), len(slices))
    if workers == 1:
        parts = [fn(array[s]) for s in slices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda s: fn(array[s]), slices))
    return np.concatenate(parts, axis=0)
