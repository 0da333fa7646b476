"""Chunked enumeration of maps from an n-element set into {0, ..., k-1}.

Maps are yielded as integer arrays of shape (chunk, n) in lexicographic
order, position 0 being the most significant digit.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

from divkit.errors import CapacityError

MAX_MAPS = 2**24
CHUNK = 2**15


def check_capacity(n: int, k: int) -> None:
    if k < 1:
        raise CapacityError(f"k must be positive, got {k}")
    if n * np.log2(k) > np.log2(MAX_MAPS) + 1e-12:
        raise CapacityError(f"{k}^{n} maps exceeds the enumeration bound 2^24")


def labeled_maps(n: int, k: int) -> Iterator[np.ndarray]:
    """Every map, in lexicographic order."""
    check_capacity(n, k)
    total = k**n
    place = k ** np.arange(n - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, CHUNK):
        idx = np.arange(start, min(start + CHUNK, total), dtype=np.int64)
        yield (idx[:, None] // place) % k


def partition_maps(n: int, k: int) -> Iterator[np.ndarray]:
    """Restricted growth strings with at most k blocks.

    Each unordered partition of the n positions into at most k blocks shows
    up exactly once, as its lexicographically least labelling.
    """
    k = min(k, n)
    check_capacity(n, k)
    if k == 1:
        yield np.zeros((1, n), dtype=np.int64)
        return
    # leading digit of a restricted growth string is always 0
    total = k ** (n - 1)
    place = k ** np.arange(n - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, CHUNK):
        idx = np.arange(start, min(start + CHUNK, total), dtype=np.int64)
        maps = (idx[:, None] // place) % k
        running = np.maximum.accumulate(maps, axis=1)
        ok = np.all(maps[:, 1:] <= running[:, :-1] + 1, axis=1)
        if ok.any():
            yield maps[ok]


def block_masses(maps: np.ndarray, probs: np.ndarray, k: int) -> np.ndarray:
    """Mass of each block under ``probs``; shape (chunk, k)."""
    onehot = maps[:, :, None] == np.arange(k)
    return np.einsum("ink,n->ik", onehot, probs)
