"""mulab.parallel

Deterministic indexed map over a process pool.

Results always come back in input order, so any reduction over them is
independent of the worker count.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from .defaults import DEFAULT_WORKERS

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(workers: Optional[int]) -> int:
    return max(1, DEFAULT_WORKERS if workers is None else int(workers))


def indexed_map(
    func: Callable[[T], R],
    items: Iterable[T],
    *,
    workers: Optional[int] = None,
    chunksize: int = 1,
) -> List[R]:
    """``[func(x) for x in items]``, optionally fanned out to worker processes.

    ``func`` must be a module-level callable when ``workers > 1``.
    """
    items = list(items)
    n_workers = min(resolve_workers(workers), max(1, len(items)))
    if n_workers == 1:
        return [func(x) for x in items]
    logger.debug("indexed_map: %d items on %d workers", len(items), n_workers)
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(func, items, chunksize=max(1, chunksize)))
