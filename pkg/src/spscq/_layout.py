"""Cache-line separation of producer-owned and consumer-owned fields.

CPython stores ``__slots__`` attributes as consecutive pointer-sized words
inside the instance, in sorted name order. Padding slots named
``<field>_padNN`` sort directly after ``<field>``, so they push the next hot
field onto a different cache line. Offsets are measured, not assumed.
"""

from __future__ import annotations

import ctypes
import os
import struct
from functools import lru_cache

WORD = struct.calcsize("P")


def _default_cache_line() -> int:
    value = int(os.environ.get("SPSCQ_CACHE_LINE", "64"))
    check_cache_line(value)
    return value


def check_cache_line(cache_line: int) -> None:
    if cache_line < WORD or cache_line % WORD:
        raise ValueError(f"cache line must be a positive multiple of {WORD} bytes, got {cache_line}")


CACHE_LINE = _default_cache_line()


def pad_names(field: str, cache_line: int) -> tuple[str, ...]:
    return tuple(f"{field}_pad{i:02d}" for i in range(cache_line // WORD - 1))


def slot_offset(cls: type, name: str) -> int:
    """Byte offset of slot ``name`` inside instances of ``cls``.

    Found by storing a unique marker in the slot and scanning the instance
    words for its address.
    """
    probe = object.__new__(cls)
    marker = object()
    setattr(probe, name, marker)
    base = id(probe)
    for off in range(0, cls.__basicsize__, WORD):
        if ctypes.c_void_p.from_address(base + off).value == id(marker):
            return off
    raise LookupError(f"slot {name!r} not found in {cls.__name__}")


@lru_cache(maxsize=None)
def padded_type(base: type, cache_line: int) -> type:
    """Concrete subclass of ``base`` whose two hot fields sit on separate lines.

    ``base`` declares ``__slots__ = ()`` plus ``_hot_fields`` (a pair, consumer
    side first or producer side first, sorted by name) and ``_cold_fields``.
    """
    check_cache_line(cache_line)
    first, second = base._hot_fields
    if not first + "_" < second:
        raise TypeError(f"{first!r} must sort before {second!r} for padding to apply")
    slots = (first, *pad_names(first, cache_line), second, *pad_names(second, cache_line), *base._cold_fields)
    cls = type(base.__name__, (base,), {"__slots__": slots, "__module__": base.__module__, "_padded": True})
    cls.__qualname__ = base.__qualname__
    gap = slot_offset(cls, second) - slot_offset(cls, first)
    assert gap >= cache_line, f"{base.__name__}: hot fields only {gap} bytes apart"
    return cls


def hot_field_gap(obj: object) -> int:
    """Distance in bytes between the two hot fields of a padded instance."""
    cls = type(obj)
    first, second = cls._hot_fields
    return abs(slot_offset(cls, second) - slot_offset(cls, first))
