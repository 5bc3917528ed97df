"""Uniform construction of the five queue kinds.

``capacity`` means the ring size for ``spsc``/``mspsc``, the internal ring
size for ``uspsc``/``muspsc`` and the node-cache size for ``dspsc``.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

from .dspsc import DynQueue
from .multipush import DEFAULT_STAGE_SIZE, MultiPushRing
from .ring import RingBuffer
from .uspsc import MultiPushUnboundedQueue, UnboundedQueue

__all__ = ["KINDS", "BOUNDED_KINDS", "STAGED_KINDS", "Channel", "make_channel"]

KINDS = ("spsc", "mspsc", "dspsc", "uspsc", "muspsc")
BOUNDED_KINDS = frozenset({"spsc", "mspsc"})
STAGED_KINDS = frozenset({"mspsc", "muspsc"})


def _always() -> bool:
    return True


@dataclass(frozen=True)
class Channel:
    """Bound entry points of one queue instance.

    ``push`` returning False means the item was not accepted and must be
    retried, except for staged kinds, where it means the item is staged but
    ``flush`` has to succeed before the next ``push``.
    """

    kind: str
    queue: Any
    push: Callable[[Any], bool]
    pop: Callable[[], Any]
    flush: Callable[[], bool]
    capacity: int
    stage_size: int | None

    @property
    def bounded(self) -> bool:
        return self.kind in BOUNDED_KINDS

    @property
    def staged(self) -> bool:
        return self.kind in STAGED_KINDS


def make_channel(kind: str, capacity: int, stage_size: int = DEFAULT_STAGE_SIZE) -> Channel:
    if kind == "spsc":
        q = RingBuffer(capacity)
        return Channel(kind, q, q.push, q.pop, _always, capacity, None)
    if kind == "mspsc":
        q = MultiPushRing(capacity, stage_size)
        return Channel(kind, q, q.mpush, q.ring.pop, q.flush, capacity, stage_size)
    if kind == "dspsc":
        q = DynQueue(capacity)
        return Channel(kind, q, q.push, q.pop, _always, capacity, None)
    if kind == "uspsc":
        q = UnboundedQueue(capacity)
        return Channel(kind, q, q.push, q.pop, _always, capacity, None)
    if kind == "muspsc":
        q = MultiPushUnboundedQueue(capacity, stage_size=stage_size)
        return Channel(kind, q, q.mpush, q.pop, q.flush, capacity, stage_size)
    raise ValueError(f"unknown queue kind {kind!r}; expected one of {', '.join(KINDS)}")
