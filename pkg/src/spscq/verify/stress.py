"""Two-thread FIFO stress runs.

The producer pushes the integers ``0..n_items-1``; the consumer pops and
compares each value against a running counter, so the first gap, duplicate
or reordering is caught at its exact index. Optional delay models inject
sleeps on either side to drive the queue through its empty, full and
buffer-switch paths.
"""

from __future__ import annotations

import random
import threading
import time
from dataclasses import dataclass, field

from .._spin import backoff
from ..kinds import make_channel
from ..multipush import DEFAULT_STAGE_SIZE
from ..ring import EMPTY

__all__ = ["DelayModel", "StressReport", "StressFailure", "stress_fifo"]


@dataclass(frozen=True)
class DelayModel:
    """Sleep for up to ``max_us`` microseconds before roughly one op in ``1/rate``."""

    rate: float = 0.001
    max_us: float = 200.0
    seed: int = 0

    def schedule(self, n: int) -> list[tuple[int, float]]:
        """Sorted (op index, seconds) stall points for a run of ``n`` ops."""
        rng = random.Random(self.seed)
        k = min(n, int(n * self.rate))
        return [(i, rng.uniform(0.0, self.max_us) * 1e-6) for i in sorted(rng.sample(range(n), k))]


class StressFailure(AssertionError):
    def __init__(self, kind: str, index: int, message: str) -> None:
        self.kind, self.index = kind, index
        super().__init__(f"{kind}: {message}")


@dataclass
class StressReport:
    kind: str
    n_items: int
    capacity: int
    received: int
    elapsed: float
    first_bad_index: int | None = None
    message: str = ""
    census: dict[str, int] | None = field(default=None)

    @property
    def passed(self) -> bool:
        return self.first_bad_index is None and self.received == self.n_items

    @property
    def items_per_second(self) -> float:
        return self.received / self.elapsed if self.elapsed > 0 else float("inf")

    @property
    def ns_per_transfer(self) -> float:
        return self.elapsed * 1e9 / self.received if self.received else float("nan")


def _segments(n: int, delay: DelayModel | None) -> list[tuple[int, int, float]]:
    """Split ``range(n)`` into (start, stop, stall before start) pieces."""
    if delay is None:
        return [(0, n, 0.0)]
    out, start, pause = [], 0, 0.0
    for i, s in delay.schedule(n):
        if i > start:
            out.append((start, i, pause))
            start, pause = i, 0.0
        pause += s
    out.append((start, n, pause))
    return out


def stress_fifo(
    kind: str,
    n_items: int,
    producer_delay: DelayModel | None = None,
    consumer_delay: DelayModel | None = None,
    *,
    capacity: int = 1024,
    stage_size: int = DEFAULT_STAGE_SIZE,
    timeout: float = 120.0,
    check: bool = True,
) -> StressReport:
    """Run one producer and one consumer thread through a fresh ``kind`` queue.

    Returns the report; with ``check`` (the default) a failed run raises
    ``StressFailure`` carrying the first bad index instead.
    """
    if n_items < 1:
        raise ValueError("n_items must be >= 1")
    ch = make_channel(kind, capacity, stage_size)
    stop = threading.Event()
    received = [0]
    bad: list[tuple[int, str]] = []

    def producer() -> None:
        push, flush = ch.push, ch.flush
        for start, end, pause in _segments(n_items, producer_delay):
            if pause:
                time.sleep(pause)
            for i in range(start, end):
                tries = 0
                while not push(i):
                    # staged kinds: item accepted, but the stage must drain before the next one
                    if ch.staged:
                        while not flush():
                            tries += 1
                            if stop.is_set():
                                return
                            backoff(tries)
                        break
                    tries += 1
                    if stop.is_set():
                        return
                    backoff(tries)
        tries = 0
        while not flush():
            tries += 1
            if stop.is_set():
                return
            backoff(tries)

    def consumer() -> None:
        pop = ch.pop
        expected = 0
        for start, end, pause in _segments(n_items, consumer_delay):
            if pause:
                time.sleep(pause)
            while expected < end:
                x = pop()
                if x is EMPTY:
                    tries = 1
                    while (x := pop()) is EMPTY:
                        tries += 1
                        if stop.is_set():
                            received[0] = expected
                            return
                        backoff(tries)
                if x != expected:
                    bad.append((expected, _describe(x, expected)))
                    received[0] = expected
                    stop.set()
                    return
                expected += 1
        received[0] = expected
        # anything still poppable now is an extra item
        x = pop()
        if x is not EMPTY:
            bad.append((expected, f"extra item {x!r} after all {n_items} were received"))

    threads = [threading.Thread(target=producer, name=f"{kind}-producer"), threading.Thread(target=consumer, name=f"{kind}-consumer")]
    t0 = time.perf_counter()
    for t in threads:
        t.start()
    threads[1].join(timeout)
    if threads[1].is_alive():
        stop.set()
        threads[1].join()
        if not bad:
            bad.append((received[0], f"timed out after {timeout:.0f} s with {received[0]} of {n_items} items received"))
    elapsed = time.perf_counter() - t0
    stop.set()
    threads[0].join()

    report = StressReport(kind, n_items, capacity, received[0], elapsed)
    if bad:
        report.first_bad_index, report.message = bad[0]
    census = getattr(ch.queue, "census", None)
    if census is not None:
        report.census = census()
    if check and not report.passed:
        raise StressFailure(kind, report.first_bad_index or 0, report.message or "incomplete run")
    return report


def _describe(got: object, expected: int) -> str:
    if isinstance(got, int) and got > expected:
        return f"item {expected} lost: received {got} in its place"
    if isinstance(got, int) and got < expected:
        return f"item {got} received again at position {expected}"
    return f"unexpected value {got!r} at position {expected}"

