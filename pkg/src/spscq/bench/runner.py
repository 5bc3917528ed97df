"""Benchmark drivers: raw producer/consumer transfer and the sin/cos pipeline.

Latency is reported as nanoseconds per transfer, one push plus its matching
pop, i.e. run time divided by the number of items.
"""

from __future__ import annotations

import math
import os
import threading
import time
import warnings
from dataclasses import dataclass

from .._spin import backoff
from ..kinds import KINDS, STAGED_KINDS, Channel, make_channel
from ..multipush import DEFAULT_STAGE_SIZE
from ..ring import EMPTY
from .stats import StatsRecord, compute_stats

__all__ = [
    "BENCHES",
    "BenchConfig",
    "ConfigError",
    "VerificationError",
    "MicrokernelResult",
    "run_raw_pipeline",
    "run_microkernel",
    "microkernel_sequential",
    "X0",
    "Y0",
]

BENCHES = ("raw", "microkernel")
X0 = 0.12345678
Y0 = 0.654321012


class ConfigError(ValueError):
    pass


class VerificationError(AssertionError):
    def __init__(self, message: str, index: int | None = None) -> None:
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class BenchConfig:
    queue_kind: str = "spsc"
    capacity: int = 1024
    n_items: int = 1_000_000
    runs: int = 100
    producer_core: int | None = None
    consumer_core: int | None = None
    bench: str = "raw"
    stage_size: int = DEFAULT_STAGE_SIZE

    def __post_init__(self) -> None:
        if self.queue_kind not in KINDS:
            raise ConfigError(f"unknown queue kind {self.queue_kind!r}")
        if self.bench not in BENCHES:
            raise ConfigError(f"unknown bench {self.bench!r}")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.n_items < 1:
            raise ConfigError("items must be >= 1")
        if self.capacity < 1:
            raise ConfigError("capacity must be >= 1")
        if self.queue_kind in ("uspsc", "muspsc") and self.capacity < 2:
            raise ConfigError(f"{self.queue_kind} needs capacity >= 2")
        if self.queue_kind in STAGED_KINDS and not 1 <= self.stage_size <= self.capacity:
            raise ConfigError(f"stage size must be in [1, capacity], got {self.stage_size}")
        if (self.producer_core is None) != (self.consumer_core is None):
            raise ConfigError("pin both threads or neither")

    def channel(self) -> Channel:
        return make_channel(self.queue_kind, self.capacity, self.stage_size)


def _pin(core: int | None, role: str, placement: dict[str, str]) -> None:
    """Best-effort: pin the calling thread to ``core`` and record where it may run."""
    getaff = getattr(os, "sched_getaffinity", None)
    if core is not None:
        try:
            os.sched_setaffinity(0, {core})
        except (AttributeError, OSError, ValueError) as exc:
            warnings.warn(f"could not pin {role} to CPU {core} ({exc}); running unpinned", RuntimeWarning, stacklevel=2)
    if getaff is not None:
        placement[role] = ",".join(map(str, sorted(getaff(0))))


def _produce(ch: Channel, stream: object, stop: threading.Event) -> None:
    push, flush, staged = ch.push, ch.flush, ch.staged
    for x in stream:
        if not push(x):
            tries = 0
            retry = flush if staged else (lambda: push(x))
            while not retry():
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


def _two_stage(cfg: BenchConfig, producer: object, consumer: object) -> tuple[float, dict[str, str]]:
    """Run ``producer(stop)`` and ``consumer(stop)`` on two threads; time from common start to consumer end."""
    placement: dict[str, str] = {}
    barrier = threading.Barrier(2)
    stop = threading.Event()
    marks: dict[str, float] = {}
    errors: list[BaseException] = []

    def wrap(role: str, core: int | None, body: object) -> None:
        try:
            _pin(core, role, placement)
            barrier.wait()
            marks[role + "_start"] = time.perf_counter()
            body(stop)
            marks[role + "_end"] = time.perf_counter()
        except BaseException as exc:  # surfaced in the main thread
            errors.append(exc)
            stop.set()

    threads = [
        threading.Thread(target=wrap, args=("producer", cfg.producer_core, producer)),
        threading.Thread(target=wrap, args=("consumer", cfg.consumer_core, consumer)),
    ]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        for t in threads:
            t.start()
        for t in threads:
            t.join()
    for w in caught:
        warnings.warn(w.message, w.category, stacklevel=3)
    if errors:
        raise errors[0]
    return marks["consumer_end"] - min(marks["producer_start"], marks["consumer_start"]), placement


def _raw_once(cfg: BenchConfig) -> tuple[float, dict[str, str]]:
    ch = cfg.channel()
    n = cfg.n_items

    def consumer(stop: threading.Event) -> None:
        pop = ch.pop
        for expected in range(n):
            x = pop()
            if x is EMPTY:
                tries = 1
                while (x := pop()) is EMPTY:
                    tries += 1
                    if stop.is_set():
                        return
                    backoff(tries)
            if x != expected:
                raise VerificationError(f"{cfg.queue_kind}: expected item {expected}, got {x!r}", expected)

    return _two_stage(cfg, lambda stop: _produce(ch, range(n), stop), consumer)


def run_raw_pipeline(cfg: BenchConfig, warmup: bool = True) -> StatsRecord:
    """Push ``0..n_items-1`` through a fresh queue per run; verify every value on the way out."""
    if warmup:
        _raw_once(cfg)
    times, placement = [], {}
    for _ in range(cfg.runs):
        elapsed, placement = _raw_once(cfg)
        times.append(elapsed)
    return compute_stats(times, cfg.n_items, placement)


def microkernel_sequential(n: int, x: float = X0, y: float = Y0) -> float:
    sin, cos = math.sin, math.cos
    for _ in range(n):
        x = 3.1415 * sin(x)
        y += x - cos(y)
    return y


def _pipelined_once(cfg: BenchConfig) -> tuple[float, float, dict[str, str]]:
    ch = cfg.channel()
    n = cfg.n_items
    result = [math.nan]

    def xs() -> object:
        sin, x = math.sin, X0
        for _ in range(n):
            x = 3.1415 * sin(x)
            yield x

    def consumer(stop: threading.Event) -> None:
        pop, cos, y = ch.pop, math.cos, Y0
        for _ in range(n):
            x = pop()
            if x is EMPTY:
                tries = 1
                while (x := pop()) is EMPTY:
                    tries += 1
                    if stop.is_set():
                        return
                    backoff(tries)
            y += x - cos(y)
        result[0] = y

    elapsed, placement = _two_stage(cfg, lambda stop: _produce(ch, xs(), stop), consumer)
    return elapsed, result[0], placement


@dataclass(frozen=True)
class MicrokernelResult:
    sequential: StatsRecord
    pipelined: StatsRecord
    y_sequential: float
    y_pipelined: float

    @property
    def speedup(self) -> float:
        return self.sequential.mean_ns_per_op / self.pipelined.mean_ns_per_op


def run_microkernel(cfg: BenchConfig, warmup: bool = True) -> MicrokernelResult:
    """Time the sin/cos loop sequentially and split across two threads; final ``y`` must match bitwise."""
    n = cfg.n_items
    if warmup:
        microkernel_sequential(n)
        _pipelined_once(cfg)
    seq_times, pipe_times, placement = [], [], {}
    y_seq = y_pipe = math.nan
    for _ in range(cfg.runs):
        t0 = time.perf_counter()
        y_seq = microkernel_sequential(n)
        seq_times.append(time.perf_counter() - t0)
        elapsed, y_pipe, placement = _pipelined_once(cfg)
        pipe_times.append(elapsed)
        if y_pipe.hex() != y_seq.hex():
            raise VerificationError(f"{cfg.queue_kind}: pipelined y {y_pipe!r} differs from sequential y {y_seq!r}")
    return MicrokernelResult(compute_stats(seq_times, n), compute_stats(pipe_times, n, placement), y_seq, y_pipe)
