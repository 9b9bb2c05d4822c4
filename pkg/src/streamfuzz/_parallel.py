from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

THREADS_ENV = "STREAMFUZZ_THREADS"


def max_threads() -> int:
    """Thread cap from ``STREAMFUZZ_THREADS``; 1 when unset or unparsable."""
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def map_ordered(fn, items, n_threads: int | None = None) -> list:
    """``[fn(x) for x in items]``, possibly threaded; results keep input order."""
    items = list(items)
    n = max_threads() if n_threads is None else n_threads
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))
