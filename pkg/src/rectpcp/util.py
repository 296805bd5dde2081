"""Shared helpers: seeding, worker partitioning, and JSON plumbing."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

SEED_ENV = "RECTPCP_SEED"


def default_seed(explicit: int | None = None) -> int:
    if explicit is not None:
        return explicit
    env = os.environ.get(SEED_ENV)
    return int(env) if env else 0


def chunked(items: Sequence[T], n_chunks: int) -> list[Sequence[T]]:
    n_chunks = max(1, min(n_chunks, len(items) or 1))
    size = (len(items) + n_chunks - 1) // n_chunks
    return [items[i : i + size] for i in range(0, len(items), size)]


def parallel_map(fn: Callable[[T], R], items: Sequence[T], workers: int = 1) -> list[R]:
    """Deterministic map: results in input order regardless of worker count."""
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def merge_first_counterexample(results: Iterable):
    """Deterministic reduce: the first failing CheckResult in input order wins."""
    ok_result = None
    for res in results:
        if not res:
            return res
        ok_result = res
    return ok_result
