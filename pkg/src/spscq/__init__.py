"""Single-producer/single-consumer queues: a sentinel-slot ring, its batched
producer, a node-recycling linked queue and an unbounded pool of rings."""

from .dspsc import DynQueue
from .kinds import KINDS, Channel, make_channel
from .multipush import MultiPushRing, StageBuffer, flush, mpush, multipush
from .ring import EMPTY, RingBuffer
from .uspsc import BufferPool, MultiPushUnboundedQueue, UnboundedQueue

__all__ = [
    "EMPTY",
    "RingBuffer",
    "StageBuffer",
    "multipush",
    "mpush",
    "flush",
    "MultiPushRing",
    "DynQueue",
    "BufferPool",
    "UnboundedQueue",
    "MultiPushUnboundedQueue",
    "KINDS",
    "Channel",
    "make_channel",
]
