"""Seed derivation and the process pool used for independent replicas."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "HEDONET_THREADS"


def thread_cap(threads: int | None = None) -> int:
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1") or 1)
    return max(1, int(threads))


def replica_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for replica ``index``: stream ``index`` spawned from ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(index),)))


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: int | None = None) -> list[R]:
    """Ordered map; runs in worker processes when more than one is allowed.

    Results are returned in input order so output never depends on the worker
    count.
    """
    items = list(items)
    workers = min(thread_cap(threads), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
