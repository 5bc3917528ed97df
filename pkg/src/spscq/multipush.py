"""Producer-side batching for ``RingBuffer``.

Items are staged locally and written into the ring in one bulk insertion,
last item first. The slot the consumer will read first is filled last, so
the consumer cannot start on a batch until all of it is in place, and the
producer and consumer stay a whole batch apart instead of trading one cache
line back and forth.

A ring fed through ``mpush`` must not also be fed through ``push``: items
sitting in the stage would be overtaken by directly pushed ones.
"""

from __future__ import annotations

from collections.abc import Sequence
from typing import Any

from ._layout import CACHE_LINE
from .ring import EMPTY, RingBuffer

__all__ = ["DEFAULT_STAGE_SIZE", "StageBuffer", "multipush", "mpush", "flush", "MultiPushRing"]

DEFAULT_STAGE_SIZE = 16


def multipush(rb: RingBuffer, batch: Sequence[Any], n: int | None = None) -> bool:
    """Insert ``batch[:n]`` into ``rb`` as one unit, or do nothing and return False.

    Succeeds only when the ``n`` slots starting at the write cursor are all
    free. Checking the last of them is enough: filled slots form one
    contiguous run starting at the read cursor, so if the far end is free,
    everything before it is too.
    """
    if n is None:
        n = len(batch)
    size = rb._size
    if not 1 <= n <= size:
        raise ValueError(f"batch length must be in [1, {size}], got {n}")
    buf = rb._buf
    start = rb._pwrite
    end = start + n  # one past the last slot, unwrapped
    last = end - 1 if end <= size else end - 1 - size
    if buf[last] is not EMPTY:
        return False
    # Extended-slice assignment with a negative step stores from the highest
    # index down, so ``buf[start]`` is always written last.
    if end <= size:
        buf[last : (start - 1 if start else None) : -1] = batch[n - 1 :: -1]
    else:
        head = size - start  # items that fit before the wrap
        buf[last::-1] = batch[n - 1 : head - 1 : -1]
        buf[size - 1 : start - 1 : -1] = batch[head - 1 :: -1]
    rb._pwrite = 0 if last + 1 >= size else last + 1
    return True


class StageBuffer:
    """Producer-local batch of at most ``size`` items, in arrival order."""

    __slots__ = ("items", "size")

    def __init__(self, size: int = DEFAULT_STAGE_SIZE) -> None:
        if size < 1:
            raise ValueError(f"stage size must be >= 1, got {size}")
        self.size = size
        self.items: list[Any] = []

    @property
    def count(self) -> int:
        return len(self.items)

    def __len__(self) -> int:
        return len(self.items)


def flush(rb: RingBuffer, stage: StageBuffer) -> bool:
    """Publish whatever is staged. True if the stage is now empty."""
    items = stage.items
    if not items or multipush(rb, items):
        items.clear()
        return True
    return False


def _publish_full(rb: RingBuffer, stage: StageBuffer) -> bool:
    items = stage.items
    if len(items) > stage.size:
        # the stage was left full by an earlier failure
        item = items.pop()
        if not multipush(rb, items):
            raise BufferError("stage is full: flush() must succeed before the next mpush()")
        items.clear()
        items.append(item)
        return True
    if multipush(rb, items):
        items.clear()
        return True
    return False


def mpush(rb: RingBuffer, stage: StageBuffer, item: Any) -> bool:
    """Stage ``item``; bulk-insert the stage once it holds ``stage.size`` items.

    False means the ring could not take the full stage. ``item`` is staged
    regardless; call :func:`flush` until it succeeds before staging more.
    """
    items = stage.items
    items.append(item)
    if len(items) < stage.size:
        return True
    return _publish_full(rb, stage)


class MultiPushRing:
    """A ``RingBuffer`` whose producer always goes through a stage (mSPSC).

    Producer side: ``mpush``, ``flush``. Consumer side: ``pop``, ``empty``.
    """

    __slots__ = ("ring", "stage", "_items", "_k")

    def __init__(self, capacity: int, stage_size: int = DEFAULT_STAGE_SIZE, cache_line: int = CACHE_LINE) -> None:
        if stage_size > capacity:
            raise ValueError(f"stage size {stage_size} exceeds ring capacity {capacity}")
        self.ring = RingBuffer(capacity, cache_line)
        self.stage = StageBuffer(stage_size)
        self._items = self.stage.items
        self._k = stage_size

    def mpush(self, item: Any) -> bool:
        items = self._items
        items.append(item)
        k = len(items)
        if k < self._k:
            return True
        if k == self._k and multipush(self.ring, items, k):
            items.clear()
            return True
        return _publish_full(self.ring, self.stage)

    def flush(self) -> bool:
        items = self._items
        if not items or multipush(self.ring, items):
            items.clear()
            return True
        return False

    def pop(self) -> Any:
        return self.ring.pop()

    def empty(self) -> bool:
        return self.ring.empty()
