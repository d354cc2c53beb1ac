"""Small shared helpers: worker-capped parallel map."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

__all__ = ["pmap", "worker_count"]


def worker_count() -> int:
    """Worker cap from VISCOSHEAR_THREADS; 0 or unset means auto (serial).

    Results are collected in input order either way, so the output is
    independent of the worker count.
    """
    raw = os.environ.get("VISCOSHEAR_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        return 1
    if n <= 0:
        return 1
    return n


def pmap(fn: Callable, items: Sequence) -> list:
    """Ordered map over items, threaded when VISCOSHEAR_THREADS > 1."""
    n = worker_count()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))
