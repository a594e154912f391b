import os
from concurrent.futures import ThreadPoolExecutor


def thread_count():
    """Worker count from ``GCUR_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("GCUR_THREADS", "1")))
    except ValueError:
        return 1


def ordered_map(fn, items):
    """``list(map(fn, items))``, fanned out over threads; order is preserved."""
    items = list(items)
    workers = min(thread_count(), len(items)) or 1
    if workers == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
