from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

ENV_VAR = "KOOPMAN_CRITERIA_THREADS"


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get(ENV_VAR, "1")))
    except ValueError:
        return 1


def pmap(fn, items):
    """Order-preserving map, threaded when KOOPMAN_CRITERIA_THREADS > 1."""
    items = list(items)
    n = min(thread_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
