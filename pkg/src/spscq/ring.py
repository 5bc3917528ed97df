"""Bounded wait-free single-producer/single-consumer ring buffer.

Each slot doubles as the control word: a slot holding ``EMPTY`` is free for
the producer, anything else is a published item for the consumer. Producer
and consumer therefore never read each other's cursor, and the full capacity
``N`` is usable (a head/tail comparison scheme only gets ``N - 1``).

Memory ordering: the store that fills a slot is the publication point. It is
a single ``STORE_SUBSCR`` issued after every earlier write of the producer,
and CPython's interpreter lock makes it a release store paired with the
consumer's acquire load of the same slot. This covers both hazards a C
version guards with a write barrier: payload visibility before the slot
store, and slot visibility before any later producer store.
"""

from __future__ import annotations

from typing import Any

from ._layout import CACHE_LINE, padded_type

__all__ = ["EMPTY", "RingBuffer"]


class _Empty:
    """Marker for a free slot and for "nothing to pop"."""

    __slots__ = ()
    _instance: _Empty | None = None

    def __new__(cls) -> _Empty:
        if cls._instance is None:
            cls._instance = object.__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "EMPTY"

    def __bool__(self) -> bool:
        return False

    def __reduce__(self) -> str:
        return "EMPTY"


EMPTY: Any = _Empty()


class RingBuffer:
    """Fixed-capacity SPSC circular buffer.

    ``push``/``available`` belong to the producer thread, ``pop``/``empty``
    to the consumer thread. Any object except ``EMPTY`` may be pushed,
    ``None`` included.

    >>> rb = RingBuffer(2)
    >>> rb.push("a"), rb.push("b"), rb.push("c")
    (True, True, False)
    >>> rb.pop(), rb.pop(), rb.pop()
    ('a', 'b', EMPTY)
    """

    __slots__ = ()
    _hot_fields = ("_pread", "_pwrite")
    _cold_fields = ("_buf", "_size", "cache_line")

    def __new__(cls, capacity: int, cache_line: int = CACHE_LINE):
        if not getattr(cls, "_padded", False):
            cls = padded_type(cls, cache_line)
        return object.__new__(cls)

    def __init__(self, capacity: int, cache_line: int = CACHE_LINE) -> None:
        if capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {capacity}")
        self._size = capacity
        self._buf = [EMPTY] * capacity
        self._pread = 0
        self._pwrite = 0
        self.cache_line = cache_line

    @property
    def capacity(self) -> int:
        return self._size

    def __repr__(self) -> str:
        return f"RingBuffer(capacity={self._size}, read={self._pread}, write={self._pwrite})"

    # producer side

    def available(self) -> bool:
        return self._buf[self._pwrite] is EMPTY

    def push(self, item: Any) -> bool:
        buf = self._buf
        p = self._pwrite
        if buf[p] is not EMPTY:
            return False
        buf[p] = item
        self._pwrite = p + (1 - self._size if p + 1 >= self._size else 1)
        return True

    # consumer side

    def empty(self) -> bool:
        return self._buf[self._pread] is EMPTY

    def pop(self) -> Any:
        """Remove and return the oldest item, or ``EMPTY`` if there is none."""
        buf = self._buf
        p = self._pread
        item = buf[p]
        if item is EMPTY:
            return EMPTY
        buf[p] = EMPTY
        self._pread = p + (1 - self._size if p + 1 >= self._size else 1)
        return item

    def reset(self) -> None:
        """Clear all slots and rewind both cursors. Only valid while unshared."""
        self._buf[:] = [EMPTY] * self._size
        self._pread = 0
        self._pwrite = 0

    def occupancy(self) -> int:
        """Number of filled slots. A snapshot; exact only when quiescent."""
        return sum(1 for x in self._buf if x is not EMPTY)
