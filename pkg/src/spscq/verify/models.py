"""Step-program models of the queue algorithms, for ``explore``.

Every model pushes a few distinct items from a producer thread while a
consumer thread races ``racing_pops`` pop attempts against it. The consumer
then waits for quiescence (producer finished, every store in memory) and
drains what is left. The property checked is end-to-end FIFO: the consumer
receives exactly the successfully pushed items, in order.

Shared locations are tuples such as ``("B0", "slot", 1)`` or
``("B0", "pwrite")``; ``NULL`` is the empty slot / null pointer.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Generator, Sequence
from typing import Any

from .explore import NULL, Fence, Load, ModelBoundError, Quiesce, Store, StepProgram, run_sequential

__all__ = [
    "fifo_violation",
    "lamport_program",
    "lamport_capacity",
    "ring_program",
    "ring_capacity",
    "multipush_program",
    "multipush_store_order",
    "uspsc_program",
]

ITEMS = "abcdefghijklmnop"

Steps = Generator[Any, Any, Any]


def fifo_violation(expected: Sequence[Any], got: Sequence[Any]) -> str | None:
    """Describe how ``got`` differs from ``expected`` (loss, duplicate, reorder), or None."""
    if list(got) == list(expected):
        return None
    want, have = Counter(expected), Counter(got)
    lost = [x for x in expected if have[x] < want[x]]
    extra = [x for x in have if have[x] > want[x]]
    if lost:
        return f"item {lost[0]!r} lost (received {list(got)!r}, pushed {list(expected)!r})"
    if extra:
        return f"item {extra[0]!r} received more often than pushed (received {list(got)!r})"
    i = next(i for i, (a, b) in enumerate(zip(expected, got)) if a != b)
    return f"reordered at position {i}: got {got[i]!r}, expected {expected[i]!r}"


def _fifo_check(results: dict[str, Any], mem: dict) -> str | None:
    return fifo_violation(results["producer"], results["consumer"])


def _consumer(pop: Any, racing_pops: int | None, n_items: int, slack: int) -> Steps:
    """Race ``racing_pops`` pops (default ``n_items + 1``), then drain after quiescence."""
    if racing_pops is None:
        racing_pops = n_items + 1
    got = []
    for _ in range(racing_pops):
        x = yield from pop()
        if x is not NULL:
            got.append(x)
    yield Quiesce()
    misses = 0
    while len(got) < n_items and misses <= slack:
        x = yield from pop()
        if x is NULL:
            misses += 1
        else:
            got.append(x)
    return got


def _items(n_items: int) -> list[str]:
    if not 1 <= n_items <= len(ITEMS):
        raise ValueError(f"n_items must be in [1, {len(ITEMS)}]")
    return list(ITEMS[:n_items])


# Lamport's ring: shared head/tail compared by both sides, usable capacity N - 1


def _lamport_ops(n: int) -> tuple[Any, Any]:
    def push(x: Any) -> Steps:
        t = yield Load(("tail",))
        h = yield Load(("head",))
        if (t + 1) % n == h:
            return False
        yield Store(("slot", t), x)
        yield Store(("tail",), (t + 1) % n)
        return True

    def pop() -> Steps:
        h = yield Load(("head",))
        t = yield Load(("tail",))
        if h == t:
            return NULL
        x = yield Load(("slot", h))
        yield Store(("head",), (h + 1) % n)
        return x

    return push, pop


def lamport_program(capacity: int, n_items: int, racing_pops: int | None = None) -> StepProgram:
    push, pop = _lamport_ops(capacity)
    items = _items(n_items)

    def producer() -> Steps:
        pushed = []
        for x in items:
            if (yield from push(x)):
                pushed.append(x)
        return pushed

    return StepProgram(
        name=f"lamport(N={capacity}, items={n_items}, racing_pops={racing_pops or n_items + 1})",
        threads=(("producer", producer), ("consumer", lambda: _consumer(pop, racing_pops, n_items, 1))),
        initial={("head",): 0, ("tail",): 0},
        check=_fifo_check,
        owners={("head",): "consumer", ("tail",): "producer"},
    )


def lamport_capacity(capacity: int) -> int:
    """How many pushes Lamport's ring accepts from empty before reporting full."""
    push, _ = _lamport_ops(capacity)

    def fill() -> Steps:
        count = 0
        while count <= capacity and (yield from push(count)):
            count += 1
        return count

    return run_sequential(fill, {("head",): 0, ("tail",): 0})


# Sentinel-slot ring: emptiness lives in the slot, cursors stay private


def _ring_ops(name: str, size: int, fence: str | None = "before") -> dict[str, Any]:
    """Producer/consumer operations on the sentinel ring stored under ``name``.

    ``fence`` places the write barrier before the slot store, after it, or
    nowhere.
    """

    def nxt(p: int) -> int:
        return 0 if p + 1 >= size else p + 1

    def available() -> Steps:
        p = yield Load((name, "pwrite"))
        v = yield Load((name, "slot", p))
        return v is NULL

    def push(x: Any) -> Steps:
        p = yield Load((name, "pwrite"))
        v = yield Load((name, "slot", p))
        if v is not NULL:
            return False
        if fence == "before":
            yield Fence()
        yield Store((name, "slot", p), x)
        if fence == "after":
            yield Fence()
        yield Store((name, "pwrite"), nxt(p))
        return True

    def empty() -> Steps:
        p = yield Load((name, "pread"))
        v = yield Load((name, "slot", p))
        return v is NULL

    def pop() -> Steps:
        p = yield Load((name, "pread"))
        v = yield Load((name, "slot", p))
        if v is NULL:
            return NULL
        yield Store((name, "slot", p), NULL)
        yield Store((name, "pread"), nxt(p))
        return v

    def reset() -> Steps:
        for i in range(size):
            yield Store((name, "slot", i), NULL)
        yield Store((name, "pread"), 0)
        yield Store((name, "pwrite"), 0)

    return {"available": available, "push": push, "empty": empty, "pop": pop, "reset": reset}


def _cursors(*names: str) -> dict:
    init = {}
    for name in names:
        init[(name, "pread")] = 0
        init[(name, "pwrite")] = 0
    return init


def ring_program(capacity: int, n_items: int, racing_pops: int | None = None, fence: str | None = "before") -> StepProgram:
    ops = _ring_ops("R", capacity, fence)
    items = _items(n_items)

    def producer() -> Steps:
        pushed = []
        for x in items:
            if (yield from ops["push"](x)):
                pushed.append(x)
        return pushed

    return StepProgram(
        name=f"ring(N={capacity}, items={n_items}, racing_pops={racing_pops or n_items + 1}, fence={fence})",
        threads=(("producer", producer), ("consumer", lambda: _consumer(ops["pop"], racing_pops, n_items, 1))),
        initial=_cursors("R"),
        check=_fifo_check,
        owners={("R", "pread"): "consumer", ("R", "pwrite"): "producer"},
    )


def ring_capacity(capacity: int) -> int:
    """How many pushes the sentinel ring accepts from empty before reporting full."""
    ops = _ring_ops("R", capacity)

    def fill() -> Steps:
        count = 0
        while count <= capacity and (yield from ops["push"](count)):
            count += 1
        return count

    return run_sequential(fill, _cursors("R"))


# Bulk insertion in backward slot order


def _multipush_ops(name: str, size: int) -> Any:
    def multipush(batch: Sequence[Any]) -> Steps:
        start = yield Load((name, "pwrite"))
        n = len(batch)
        last = (start + n - 1) % size
        v = yield Load((name, "slot", last))
        if v is not NULL:
            return False
        for k in range(n - 1, -1, -1):
            yield Store((name, "slot", (start + k) % size), batch[k])
        yield Fence()
        yield Store((name, "pwrite"), (last + 1) % size)
        return True

    return multipush


def multipush_program(
    capacity: int, batch: int, n_batches: int = 1, start: int = 0, racing_pops: int | None = None
) -> StepProgram:
    """Producer inserts ``n_batches`` batches of ``batch`` items; cursors start at ``start``."""
    multipush = _multipush_ops("R", capacity)
    pop = _ring_ops("R", capacity)["pop"]
    items = _items(batch * n_batches)

    def producer() -> Steps:
        pushed = []
        for b in range(n_batches):
            chunk = items[b * batch : (b + 1) * batch]
            if (yield from multipush(chunk)):
                pushed.extend(chunk)
        return pushed

    return StepProgram(
        name=f"multipush(N={capacity}, batch={batch}x{n_batches}, start={start}, racing_pops={racing_pops or len(items) + 1})",
        threads=(
            ("producer", producer),
            ("consumer", lambda: _consumer(pop, racing_pops, len(items), 1)),
        ),
        initial={("R", "pread"): start, ("R", "pwrite"): start},
        check=_fifo_check,
        owners={("R", "pread"): "consumer", ("R", "pwrite"): "producer"},
    )


def multipush_store_order(capacity: int, batch: Sequence[Any], start: int = 0) -> list[tuple[int, Any]]:
    """(slot index, value) of each slot store made by one bulk insertion, in issue order."""
    multipush = _multipush_ops("R", capacity)
    log: list[tuple[int, Any]] = []
    mem = {("R", "pread"): start, ("R", "pwrite"): start}

    def run() -> Steps:
        gen = multipush(list(batch))
        op = next(gen)
        try:
            while True:
                result = yield op
                if isinstance(op, Store) and op.loc[1] == "slot":
                    log.append((op.loc[2], op.value))
                op = gen.send(result)
        except StopIteration as stop:
            return stop.value

    if not run_sequential(run, mem):
        raise ValueError("batch does not fit")
    return log


# The pool-of-rings unbounded queue


def uspsc_program(
    capacity: int,
    n_items: int,
    racing_pops: int | None = None,
    max_buffers: int = 2,
    pool_fence: bool = False,
    ring_fence: str | None = "before",
    release_buf_w: bool = False,
    cache_size: int = 2,
) -> StepProgram:
    """uSPSC: rings of ``capacity`` slots handed from producer to consumer via a pool.

    The consumer makes up to ``racing_pops`` pop attempts concurrently with
    the producer (default ``n_items + 1``, enough to take every item and
    still miss once) before draining after quiescence.

    ``pool_fence=False`` treats the handoff of a new ring through the in-use
    list as carrying no ordering of its own, so the only barriers are the
    rings' (placed per ``ring_fence``). ``pool_fence=True`` adds the barrier
    a list-based queue executes before linking a node. ``release_buf_w``
    puts a barrier right before the new ``buf_w`` is published.
    """
    items = _items(n_items)
    rings = {f"B{k}": _ring_ops(f"B{k}", capacity, ring_fence) for k in range(max_buffers)}
    node_cache = _ring_ops("NC", cache_size, ring_fence)
    buf_cache = _ring_ops("BC", cache_size, ring_fence)
    BUF_W = ("uq", "buf_w")
    HEAD, TAIL = ("inuse", "head"), ("inuse", "tail")

    def inuse_push(buf: str, counters: dict) -> Steps:
        n = yield from node_cache["pop"]()
        if n is NULL:
            n = f"n{counters['node']}"
            counters["node"] += 1
        yield Store((n, "data"), buf)
        yield Store((n, "next"), NULL)
        if pool_fence:
            yield Fence()
        tail = yield Load(TAIL)
        yield Store((tail, "next"), n)
        yield Store(TAIL, n)

    def inuse_pop() -> Steps:
        head = yield Load(HEAD)
        n = yield Load((head, "next"))
        if n is NULL:
            return NULL
        buf = yield Load((n, "data"))
        yield Store(HEAD, n)
        yield from node_cache["push"](head)
        return buf

    def next_w(counters: dict) -> Steps:
        buf = yield from buf_cache["pop"]()
        if buf is NULL:
            if counters["buf"] >= max_buffers:
                raise ModelBoundError(f"needs more than {max_buffers} rings")
            buf = f"B{counters['buf']}"
            counters["buf"] += 1
        yield from inuse_push(buf, counters)
        return buf

    def release(buf: str) -> Steps:
        yield from rings[buf]["reset"]()
        yield from buf_cache["push"](buf)

    def push(x: Any, counters: dict) -> Steps:
        bw = yield Load(BUF_W)
        if not (yield from rings[bw]["available"]()):
            bw = yield from next_w(counters)
            if release_buf_w:
                yield Fence()
            yield Store(BUF_W, bw)
        ok = yield from rings[bw]["push"](x)
        assert ok, "push into a fresh ring failed"

    def producer() -> Steps:
        counters = {"buf": 1, "node": 1}
        for x in items:
            yield from push(x, counters)
        return items

    def consumer() -> Steps:
        buf_r = ["B0"]

        def pop() -> Steps:
            br = buf_r[0]
            if (yield from rings[br]["empty"]()):
                bw = yield Load(BUF_W)
                if bw == br:
                    return NULL
                if (yield from rings[br]["empty"]()):
                    tmp = yield from inuse_pop()
                    if tmp is not NULL:
                        yield from release(br)
                        buf_r[0] = br = tmp
            return (yield from rings[br]["pop"]())

        return (yield from _consumer(pop, racing_pops, n_items, max_buffers + 1))

    initial = _cursors(*rings, "NC", "BC")
    initial.update({BUF_W: "B0", HEAD: "n0", TAIL: "n0"})
    fences = [f"ring fence {ring_fence}"]
    if pool_fence:
        fences.append("pool fence")
    if release_buf_w:
        fences.append("release buf_w")
    return StepProgram(
        name=(
            f"uspsc(N={capacity}, items={n_items}, racing_pops={racing_pops or n_items + 1}, "
            f"rings<={max_buffers}, {', '.join(fences)})"
        ),
        threads=(("producer", producer), ("consumer", consumer)),
        initial=initial,
        check=_fifo_check,
        owners={BUF_W: "producer", TAIL: "producer", HEAD: "consumer"},
    )
