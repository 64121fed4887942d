"""Order-preserving map over independent random streams."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")


def default_workers() -> int:
    return os.cpu_count() or 1


def map_streams(func: Callable[[int], T], indices: Sequence[int], workers: int | None = 1) -> list[T]:
    """``[func(i) for i in indices]``, optionally on a thread pool.

    Each call must depend only on its stream index, so the result is the
    same for every worker count.
    """
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(indices) <= 1:
        return [func(i) for i in indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, indices))
