"""Unbounded list-based SPSC queue with a recycled-node cache.

The list always starts with a dummy node; the queue's contents are the
payloads of the nodes after it. The consumer advances ``head`` and hands the
old dummy back through a bounded ``RingBuffer``, in which the consumer is the
producer and vice versa, so recycling keeps the same two-thread discipline.

Allocation is wait-free only while the cache can satisfy it; a cache miss
falls back to the interpreter's allocator.
"""

from __future__ import annotations

from collections.abc import Iterator
from typing import Any

from ._layout import CACHE_LINE, padded_type
from .ring import EMPTY, RingBuffer

__all__ = ["DEFAULT_NODE_CACHE", "Node", "DynQueue"]

DEFAULT_NODE_CACHE = 1024


class Node:
    __slots__ = ("data", "next")

    def __init__(self) -> None:
        self.data: Any = EMPTY
        self.next: Node | None = None


class DynQueue:
    """dSPSC: linked FIFO of ``Node`` objects.

    ``push`` is producer-only, ``pop``/``empty`` consumer-only.
    ``allocs`` counts nodes created by the producer, ``frees`` counts nodes
    the consumer dropped because the cache was full.
    """

    __slots__ = ()
    _hot_fields = ("_head", "_tail")
    _cold_fields = ("_cache", "allocs", "frees", "cache_size")

    def __new__(cls, cache_size: int = DEFAULT_NODE_CACHE, cache_line: int = CACHE_LINE):
        if not getattr(cls, "_padded", False):
            cls = padded_type(cls, cache_line)
        return object.__new__(cls)

    def __init__(self, cache_size: int = DEFAULT_NODE_CACHE, cache_line: int = CACHE_LINE) -> None:
        self.cache_size = cache_size
        self._cache = RingBuffer(cache_size, cache_line)
        dummy = Node()
        self._head = self._tail = dummy
        self.allocs = 1
        self.frees = 0

    def push(self, item: Any) -> bool:
        n = self._cache.pop()
        if n is EMPTY:
            n = Node()
            self.allocs += 1
        n.data = item
        # n is fully built before it becomes reachable from the list
        self._tail.next = n
        self._tail = n
        return True

    def pop(self) -> Any:
        head = self._head
        n = head.next
        if n is None:
            return EMPTY
        item = n.data
        n.data = EMPTY  # n becomes the dummy
        self._head = n
        head.next = None
        if not self._cache.push(head):
            self.frees += 1
        return item

    def empty(self) -> bool:
        return self._head.next is None

    # quiescent-only inspection

    def __iter__(self) -> Iterator[Any]:
        n = self._head.next
        while n is not None:
            yield n.data
            n = n.next

    def __len__(self) -> int:
        return sum(1 for _ in self)

    def cached_nodes(self) -> int:
        return self._cache.occupancy()
