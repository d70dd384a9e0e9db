# src/system/parallel.py
#18 Oct 2026

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(
    func: Callable[[T], R],
    items: Iterable[T],
    threads: int = 1,
    on_progress=None,
    logger=None,
) -> list[R]:
    """
    Ordered map of func over items.

    Args:
        func: pure function applied to every item
        items: work items; results keep their order
        threads: worker count; 1 runs inline (bitwise reproducible)
        on_progress: function(done: int, total: int), called after each item
        logger: optional logger
    """
    logger = logger or logging.getLogger(__name__)
    items = list(items)
    total = len(items)
    if threads < 1:
        raise ValueError(f"threads must be >= 1 (got {threads})")

    if threads == 1 or total <= 1:
        results = []
        for done, item in enumerate(items, start=1):
            results.append(func(item))
            if on_progress:
                on_progress(done, total)
        return results

    logger.debug(f"[Workers] Dispatching {total} items to {threads} threads")
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = []
        for done, result in enumerate(pool.map(func, items), start=1):
            results.append(result)
            if on_progress:
                on_progress(done, total)
    return results
