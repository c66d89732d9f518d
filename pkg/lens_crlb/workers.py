"""Bounded thread pool for independent grid points and Monte Carlo trials."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from .constants import THREADS_ENV_VAR

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def max_workers() -> int:
    """Worker count: ``LENS_CRLB_THREADS`` if set to a positive integer, else the CPU count."""
    default = os.cpu_count() or 1
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning("ignoring %s=%r: not an integer", THREADS_ENV_VAR, raw)
        return default
    if value < 1:
        logger.warning("ignoring %s=%r: must be >= 1", THREADS_ENV_VAR, raw)
        return default
    return value


def ordered_map(
    func: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None
) -> List[R]:
    """Apply ``func`` to every item; results come back in input order.

    The first exception raised by ``func`` propagates once the pool has shut down.
    """
    items = list(items)
    count = workers if workers is not None else max_workers()
    if count <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    pool = ThreadPoolExecutor(max_workers=count, thread_name_prefix="lens-crlb")
    try:
        return list(pool.map(func, items))
    except BaseException:
        pool.shutdown(wait=True, cancel_futures=True)
        raise
    finally:
        pool.shutdown(wait=True)


__all__ = ["max_workers", "ordered_map"]
