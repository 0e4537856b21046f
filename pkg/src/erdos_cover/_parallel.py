"""Order-independent trial execution."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Tuple, TypeVar

T = TypeVar("T")

ENV_THREADS = "ERDOS_COVER_THREADS"


def worker_count(requested: Optional[int] = None) -> int:
    if requested is not None:
        return max(1, int(requested))
    raw = os.environ.get(ENV_THREADS, "").strip()
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1


def first_success(
    trial: Callable[[int], Tuple[bool, T]], budget: int, workers: Optional[int] = None
) -> Tuple[Optional[int], list]:
    """Run ``trial(t)`` for ``t = 0, 1, ...`` until one succeeds.

    Trials are evaluated in batches of ``workers``; the smallest successful
    index wins, so the outcome does not depend on the worker count.
    Returns ``(index or None, results in index order)``.
    """
    n = worker_count(workers)
    results: list = []
    if n == 1:
        for t in range(budget):
            ok, val = trial(t)
            results.append((ok, val))
            if ok:
                return t, results
        return None, results
    with ThreadPoolExecutor(max_workers=n) as pool:
        for start in range(0, budget, n):
            batch = list(pool.map(trial, range(start, min(budget, start + n))))
            for offset, (ok, val) in enumerate(batch):
                results.append((ok, val))
                if ok:
                    return start + offset, results
    return None, results
