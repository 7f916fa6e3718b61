"""Deterministic random-number plumbing.

All stochastic code derives counter-based Philox substreams from
``(seed, *indices)``.  Work is split into fixed-size blocks so that the
stream layout, and therefore every result, is independent of how many
threads execute the blocks: serial and parallel runs are byte-identical.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

# Paths per RNG block.  Fixed: changing it would change every sampled number.
BLOCK_PATHS = 8192

T = TypeVar("T")


def substream(seed: int, *index: int) -> np.random.Generator:
    """Generator for the substream identified by (seed, *index)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, *index))))


def path_blocks(n_paths: int) -> list[tuple[int, int]]:
    """Split n_paths into (block_index, block_size) chunks of BLOCK_PATHS."""
    out = []
    done = 0
    b = 0
    while done < n_paths:
        size = min(BLOCK_PATHS, n_paths - done)
        out.append((b, size))
        done += size
        b += 1
    return out


def thread_count() -> int:
    """Worker cap from VOLKIT_THREADS (default 1)."""
    raw = os.environ.get("VOLKIT_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(n, 1)


def ordered_map(fn: Callable[[T], object], items: Sequence[T] | Iterable[T]) -> list:
    """Map fn over items, possibly threaded, always returning in input order."""
    items = list(items)
    workers = thread_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))
