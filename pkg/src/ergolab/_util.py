"""Small internal helpers."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor


def map_indexed(fn, count: int, threads: int = 1) -> list:
    """[fn(0), ..., fn(count-1)], optionally computed on a thread pool.

    Results are collected by index, so the output does not depend on the
    thread count or scheduling order.
    """
    if threads <= 1 or count <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count)))
