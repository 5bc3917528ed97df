"""Unbounded wait-free SPSC queue built from a pool of ring buffers (uSPSC).

The producer writes into ``buf_w`` and, when it fills up, takes a fresh ring
from the pool and publishes it as the new ``buf_w``. The consumer reads from
``buf_r`` and moves on to the next ring only once ``buf_r`` is drained and
is no longer the producer's ring. Rings flow producer -> ``inuse`` (a
``DynQueue``) -> consumer -> ``bufcache`` (a ``RingBuffer``) -> producer.

Switching safety: before giving up on an empty ``buf_r``, the consumer
re-checks it after seeing ``buf_r is not buf_w``, since the producer may
have filled it just before switching. That re-check is only sound if slot
stores into the old ring are visible no later than the new ``buf_w``; with
rings of capacity 1 and reordered stores it is not, so capacity 1 is
rejected. In CPython ``buf_w`` publication is additionally a release store
(see ``ring``).
"""

from __future__ import annotations

from typing import Any

from ._layout import CACHE_LINE, padded_type
from .dspsc import DynQueue
from .multipush import DEFAULT_STAGE_SIZE, StageBuffer, multipush
from .ring import EMPTY, RingBuffer

__all__ = ["DEFAULT_POOL_CACHE", "BufferPool", "UnboundedQueue", "MultiPushUnboundedQueue"]

DEFAULT_POOL_CACHE = 32


class BufferPool:
    """Rings in flight (``inuse``) plus recycled empty rings (``bufcache``).

    ``next_w`` runs on the producer, ``next_r`` and ``release`` on the
    consumer. ``created`` is producer-owned, ``deallocated`` consumer-owned.
    """

    __slots__ = ("inuse", "bufcache", "cache_size", "cache_line", "created", "deallocated")

    def __init__(self, cache_size: int = DEFAULT_POOL_CACHE, cache_line: int = CACHE_LINE) -> None:
        self.cache_size = cache_size
        self.cache_line = cache_line
        self.inuse = DynQueue(cache_size, cache_line)
        self.bufcache = RingBuffer(cache_size, cache_line)
        self.created = 0
        self.deallocated = 0

    def allocate(self, capacity: int) -> RingBuffer:
        buf = RingBuffer(capacity, self.cache_line)
        self.created += 1
        return buf

    def next_w(self, capacity: int) -> RingBuffer:
        buf = self.bufcache.pop()
        if buf is EMPTY:
            buf = self.allocate(capacity)
        self.inuse.push(buf)
        return buf

    def next_r(self) -> RingBuffer | None:
        buf = self.inuse.pop()
        return None if buf is EMPTY else buf

    def release(self, buf: RingBuffer) -> None:
        buf.reset()
        if not self.bufcache.push(buf):
            self.deallocated += 1


class UnboundedQueue:
    """uSPSC queue. ``push`` always succeeds; ``pop`` returns ``EMPTY`` when drained.

    ``capacity`` is the size of each internal ring and must be at least 2.
    ``empty()`` reports on the consumer's current ring only: it can be True
    while later rings still hold items, so use ``pop`` to decide.
    """

    __slots__ = ()
    _hot_fields = ("_buf_r", "_buf_w")
    _cold_fields = ("_size", "pool")

    def __new__(cls, capacity: int, *args: Any, cache_line: int = CACHE_LINE, **kwargs: Any):
        if not getattr(cls, "_padded", False):
            cls = padded_type(cls, cache_line)
        return object.__new__(cls)

    def __init__(self, capacity: int, pool_cache: int = DEFAULT_POOL_CACHE, *, cache_line: int = CACHE_LINE) -> None:
        if capacity < 2:
            raise ValueError(f"internal ring capacity must be >= 2, got {capacity}")
        self._size = capacity
        self.pool = BufferPool(pool_cache, cache_line)
        self._buf_r = self._buf_w = self.pool.allocate(capacity)

    @property
    def capacity(self) -> int:
        return self._size

    def available(self) -> bool:
        return self._buf_w.available()

    def push(self, item: Any) -> bool:
        buf = self._buf_w
        if not buf.push(item):
            buf = self.pool.next_w(self._size)
            self._buf_w = buf
            buf.push(item)
        return True

    def empty(self) -> bool:
        return self._buf_r.empty()

    def pop(self) -> Any:
        buf = self._buf_r
        item = buf.pop()
        if item is not EMPTY:
            return item
        if buf is self._buf_w:
            return EMPTY
        if buf.empty():  # the producer may have filled it before switching
            nxt = self.pool.next_r()
            if nxt is not None:
                self.pool.release(buf)
                self._buf_r = buf = nxt
        return buf.pop()

    def census(self) -> dict[str, int]:
        """Where every ring created by this queue currently is. Quiescent only."""
        pool = self.pool
        live = {id(self._buf_r), id(self._buf_w)}
        live.update(id(b) for b in pool.inuse)
        return {
            "created": pool.created,
            "live": len(live),
            "inuse": len(pool.inuse),
            "cached": pool.bufcache.occupancy(),
            "deallocated": pool.deallocated,
        }


class MultiPushUnboundedQueue(UnboundedQueue):
    """muSPSC: uSPSC whose producer stages items and inserts them in bulk.

    A full stage goes into ``buf_w`` if it fits and into a fresh ring
    otherwise, so ``mpush``/``flush`` never fail. Items become visible after
    at most ``stage_size - 1`` further ``mpush`` calls or one ``flush``.
    """

    __slots__ = ()
    _cold_fields = UnboundedQueue._cold_fields + ("stage", "_items", "_k")

    def __init__(
        self,
        capacity: int,
        pool_cache: int = DEFAULT_POOL_CACHE,
        *,
        stage_size: int = DEFAULT_STAGE_SIZE,
        cache_line: int = CACHE_LINE,
    ) -> None:
        if stage_size > capacity:
            raise ValueError(f"stage size {stage_size} exceeds internal ring capacity {capacity}")
        super().__init__(capacity, pool_cache, cache_line=cache_line)
        self.stage = StageBuffer(stage_size)
        self._items = self.stage.items
        self._k = stage_size

    def _publish(self) -> None:
        items = self.stage.items
        if not multipush(self._buf_w, items):
            buf = self.pool.next_w(self._size)
            self._buf_w = buf
            multipush(buf, items)
        items.clear()

    def mpush(self, item: Any) -> bool:
        items = self._items
        items.append(item)
        if len(items) >= self._k:
            self._publish()
        return True

    def flush(self) -> bool:
        if self._items:
            self._publish()
        return True

    def push(self, item: Any) -> bool:
        raise TypeError("MultiPushUnboundedQueue is fed through mpush()/flush()")
