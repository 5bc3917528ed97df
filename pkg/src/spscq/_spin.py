"""Retry policy for drivers waiting on a full or empty queue.

The queues never block, so whoever calls them decides how to wait. Retry a
bounded number of times, then give the CPU away with ``sched_yield``, which
also drops the GIL. ``time.sleep(0)`` is not a substitute: on a single core
the sleeping thread tends to get the GIL straight back.
"""

from __future__ import annotations

import os

SPIN_LIMIT = 100

_yield = getattr(os, "sched_yield", None)


def backoff(attempt: int) -> None:
    """Called after the ``attempt``-th consecutive failed try (counting from 1)."""
    if attempt >= SPIN_LIMIT:
        if _yield is not None:
            _yield()
        else:  # pragma: no cover - platforms without sched_yield
            import time

            time.sleep(0)
