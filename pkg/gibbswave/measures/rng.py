"""
Keyed, counter-based random streams.

Sample ``index`` of an ensemble seeded with ``master_seed`` draws from a Philox
generator whose 128-bit key is (master_seed, index) and whose counter starts at
zero. A sample is therefore reproducible from the pair alone, independent of
how many other samples were drawn, in which order, or on which thread.

Normal variates use the Box-Muller transform on Philox doubles
(``Generator.random``). The transform is fixed here rather than delegated to
``Generator.standard_normal`` so the mapping from key to coefficients is part
of this package's documented format.
"""
from __future__ import annotations

import math
from typing import Iterable, Tuple

import numpy as np

from gibbswave.core.errors import DomainError

UINT64_MAX = 2 ** 64 - 1


def _check_key(master_seed: int, index: int) -> None:
    if not 0 <= int(master_seed) <= UINT64_MAX:
        raise DomainError(f"master_seed must be an unsigned 64-bit integer, got {master_seed}")
    if not 0 <= int(index) <= UINT64_MAX:
        raise DomainError(f"sample index must be a non-negative 64-bit integer, got {index}")


def keyed_generator(master_seed: int, index: int) -> np.random.Generator:
    """Philox stream keyed by (master_seed, index)."""
    _check_key(master_seed, index)
    key = np.array([int(master_seed), int(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def box_muller(uniforms: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Map pairs of uniforms (trailing axis interleaved u1, u2, u1, u2, ...) in
    [0, 1) to two independent standard normal arrays.
    """
    u1 = 1.0 - uniforms[..., 0::2]  # (0, 1], keeps log finite
    u2 = uniforms[..., 1::2]
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * math.pi * u2
    return radius * np.cos(angle), radius * np.sin(angle)


def normal_pairs(master_seed: int, index: int, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """``count`` pairs (h_n, l_n) of independent standard normals for one key."""
    uniforms = keyed_generator(master_seed, index).random(2 * count)
    return box_muller(uniforms)


def normal_pairs_batch(
    master_seed: int, indices: Iterable[int], count: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Stacked normal_pairs for several keys; row k belongs to indices[k]."""
    rows = [keyed_generator(master_seed, i).random(2 * count) for i in indices]
    if not rows:
        empty = np.empty((0, count))
        return empty, empty.copy()
    return box_muller(np.stack(rows))
