"""Small shared utilities."""

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    """Worker cap from ATTN_OPT_THREADS (default 1: fully deterministic)."""
    raw = os.environ.get("ATTN_OPT_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def map_chunked(fn, chunks):
    """Apply fn to each chunk, in parallel when allowed, and return the
    results in submission order (deterministic reduction)."""
    chunks = list(chunks)
    n = worker_count()
    if n <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, chunks))
