"""Order-preserving thread pool helpers."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")

ENV_THREADS = "RINGS_THREADS"


def resolve_threads(n_jobs: int | None = None) -> int:
    """Worker count: explicit value, then ``RINGS_THREADS``, then CPU count."""
    if n_jobs is None:
        env = os.environ.get(ENV_THREADS, "").strip()
        if env:
            try:
                n_jobs = int(env)
            except ValueError:
                raise ValueError(f"{ENV_THREADS} must be an integer, got {env!r}") from None
        else:
            n_jobs = os.cpu_count() or 1
    n_jobs = int(n_jobs)
    if n_jobs < 1:
        raise ValueError(f"thread count must be >= 1, got {n_jobs}")
    return n_jobs


def map_ordered(fn: Callable[[T], R], items: Iterable[T], n_jobs: int | None = None) -> list[R]:
    """Apply ``fn`` to every item and return results in input order.

    Results never depend on the worker count because each work item carries
    everything it needs (including its own seed).
    """
    items = list(items)
    workers = min(resolve_threads(n_jobs), max(len(items), 1))
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
