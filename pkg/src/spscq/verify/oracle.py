"""Single-threaded equivalence against a reference FIFO built on ``deque``.

An op sequence is a list of tuples: ``("push", item)``, ``("mpush", item)``,
``("pop",)`` or ``("flush",)``. For staged kinds ``push`` and ``mpush`` are
the same operation (stage the item); non-staged kinds reject ``mpush``.
Results are compared op by op: booleans for push/flush, the item or
``EMPTY`` for pop, and ``BufferError`` when the queue raises one.

Internally a sequence is a list of op codes plus the pushed items; random
sequences push their own op index, which keeps long runs cheap to build.
"""

from __future__ import annotations

import random
import sys
from collections import deque
from collections.abc import Sequence
from typing import Any

from ..kinds import BOUNDED_KINDS, KINDS, STAGED_KINDS, make_channel
from ..multipush import DEFAULT_STAGE_SIZE
from ..ring import EMPTY

__all__ = [
    "OracleMismatch",
    "reference_results",
    "semantics",
    "encode",
    "oracle_check",
    "check_codes",
    "random_codes",
    "random_ops",
]

PUSH, POP, FLUSH = 0, 1, 2

Op = tuple


class OracleMismatch(AssertionError):
    def __init__(self, kind: str, index: int, op: Op, expected: Any, actual: Any) -> None:
        self.kind, self.index, self.op, self.expected, self.actual = kind, index, op, expected, actual
        super().__init__(f"{kind}: op #{index} {op!r} returned {actual!r}, reference returned {expected!r}")


def reference_results(
    codes: Sequence[int],
    items: Sequence[Any] | None = None,
    capacity: int | None = None,
    stage_size: int | None = None,
) -> list[Any]:
    """Expected results of ``codes`` on a FIFO of ``capacity`` (None: unbounded).

    With ``stage_size`` set, pushes are staged and published ``stage_size`` at
    a time or on flush; a push onto a stage left full by a failed publish
    either publishes the old batch first or raises ``BufferError``.
    """
    q: deque[Any] = deque()
    popleft, enqueue, extend = q.popleft, q.append, q.extend
    stage: list[Any] = []
    cap = sys.maxsize if capacity is None else capacity
    out: list[Any] = []
    append = out.append
    for i, c in enumerate(codes):
        if c == POP:
            append(popleft() if q else EMPTY)
        elif c == PUSH:
            x = i if items is None else items[i]
            if stage_size is None:
                if len(q) < cap:
                    enqueue(x)
                    append(True)
                else:
                    append(False)
                continue
            stage.append(x)
            k = len(stage)
            if k < stage_size:
                append(True)
            elif k == stage_size:
                ok = len(q) + k <= cap
                if ok:
                    extend(stage)
                    stage.clear()
                append(ok)
            elif len(q) + stage_size <= cap:
                extend(stage[:-1])
                del stage[:-1]
                append(True)
            else:
                stage.pop()
                append(BufferError)
        else:
            ok = len(q) + len(stage) <= cap
            if ok:
                extend(stage)
                stage.clear()
            append(ok)
    return out


def _run(push: Any, pop: Any, flush: Any, codes: Sequence[int], items: Sequence[Any] | None) -> list[Any]:
    out: list[Any] = []
    ops = enumerate(codes)  # shared, so a restart resumes after the op that raised
    while True:
        if items is None:
            gen = (push(i) if c == PUSH else pop() if c == POP else flush() for i, c in ops)
        else:
            gen = (push(items[i]) if c == PUSH else pop() if c == POP else flush() for i, c in ops)
        try:
            out.extend(gen)  # keeps the results produced before a raise
        except BufferError:
            out.append(BufferError)
        else:
            return out


def _check_kind(kind: str) -> None:
    if kind not in KINDS:
        raise ValueError(f"unknown queue kind {kind!r}; expected one of {', '.join(KINDS)}")


def semantics(kind: str) -> tuple[bool, bool]:
    """(bounded, staged): kinds with equal semantics share reference results."""
    _check_kind(kind)
    return kind in BOUNDED_KINDS, kind in STAGED_KINDS


def encode(kind: str, ops: Sequence[Op]) -> tuple[list[int], list[Any]]:
    """Op tuples -> (codes, items); ``items[i]`` is meaningful only for pushes."""
    _check_kind(kind)
    staged = kind in STAGED_KINDS
    codes, items = [], []
    for op in ops:
        name = op[0]
        if name == "push" or (name == "mpush" and staged):
            codes.append(PUSH)
            items.append(op[1])
        elif name in ("pop", "flush"):
            codes.append(POP if name == "pop" else FLUSH)
            items.append(None)
        else:
            raise ValueError(f"op {op!r} not supported by {kind}")
    return codes, items


def check_codes(
    kind: str,
    codes: Sequence[int],
    items: Sequence[Any] | None = None,
    capacity: int = 8,
    stage_size: int = DEFAULT_STAGE_SIZE,
    expected: list[Any] | None = None,
) -> list[Any]:
    """Run ``kind`` and the reference over ``codes``; raise ``OracleMismatch`` on the first difference.

    ``items=None`` pushes the op index. Pass a precomputed ``expected`` to
    share one reference run between kinds with the same semantics. Returns
    the reference results.
    """
    if expected is None:
        bounded, staged = semantics(kind)
        expected = reference_results(codes, items, capacity if bounded else None, stage_size if staged else None)
    ch = make_channel(kind, capacity, stage_size)
    actual = _run(ch.push, ch.pop, ch.flush, codes, items)
    if expected != actual:
        i = next((i for i, (e, a) in enumerate(zip(expected, actual)) if e != a), min(len(expected), len(actual)))
        code = codes[i]
        op = ("push", i if items is None else items[i]) if code == PUSH else ("pop",) if code == POP else ("flush",)
        raise OracleMismatch(kind, i, op, expected[i] if i < len(expected) else None, actual[i] if i < len(actual) else None)
    return expected


def oracle_check(kind: str, ops: Sequence[Op], capacity: int = 8, stage_size: int = DEFAULT_STAGE_SIZE) -> bool:
    """True if ``kind`` matches the reference on every op; raises ``OracleMismatch`` otherwise."""
    codes, items = encode(kind, ops)
    check_codes(kind, codes, items, capacity, stage_size)
    return True


def random_codes(n: int, rng: random.Random, push_weight: float = 0.55, flush_weight: float = 0.05) -> list[int]:
    return rng.choices((PUSH, POP, FLUSH), (push_weight, 1.0 - push_weight - flush_weight, flush_weight), k=n)


def random_ops(n: int, rng: random.Random, push_weight: float = 0.55, flush_weight: float = 0.05) -> list[Op]:
    """``n`` random op tuples; pushed items are their op index, so every item is distinct."""
    names = ("push", "pop", "flush")
    return [
        ("push", i) if c == PUSH else (names[c],)
        for i, c in enumerate(random_codes(n, rng, push_weight, flush_weight))
    ]
