"""Exhaustive interleaving exploration of small step programs.

A step program gives each thread as a generator function that yields one
atomic operation at a time (``Load``, ``Store``, ``Fence``, ``Quiesce``) and
receives the loaded value back. Threads are deterministic, so a thread's
state is fully determined by the sequence of results it has been sent; the
explorer uses that history as the thread's identity, which makes global
states hashable and lets depth-first search skip states it has seen.

Memory models:

``SC``
    Every store hits shared memory immediately; executions are exactly the
    interleavings of the threads' program orders.
``RELAX_WW``
    Stores of the relaxed threads go into a per-thread store buffer and reach
    memory later, in any order, except that two stores to the same location
    keep their order and a ``Fence`` waits until the buffer is empty. A
    thread's loads see its own buffered stores. Only store-store reordering
    is modelled; loads are never reordered.
"""

from __future__ import annotations

import enum
from collections.abc import Callable, Generator, Hashable, Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any, NamedTuple

__all__ = [
    "NULL",
    "Load",
    "Store",
    "Fence",
    "Quiesce",
    "MemoryModel",
    "StepProgram",
    "Step",
    "ExplorationResult",
    "ModelBoundError",
    "explore",
    "replay",
    "run_sequential",
]

NULL = None  # the empty-slot / null-pointer value of the models

Location = Hashable
ThreadProgram = Callable[[], Generator[Any, Any, Any]]


class Load(NamedTuple):
    loc: Location


class Store(NamedTuple):
    loc: Location
    value: Any


class Fence(NamedTuple):
    """Write barrier: all earlier stores of this thread reach memory first."""


class Quiesce(NamedTuple):
    """Wait until every other thread has finished and all stores are in memory."""


class _Done(NamedTuple):
    result: Any


class _Raised(NamedTuple):
    error: BaseException


class ModelBoundError(Exception):
    """A program needed more resources than the instance bound allows."""


class MemoryModel(enum.Enum):
    SC = "sc"
    RELAX_WW = "relax-ww"


@dataclass(frozen=True)
class StepProgram:
    """A multi-threaded model plus the property every execution must satisfy.

    ``check`` receives the threads' return values (by name) and the final
    memory, and returns a description of the violation or None.
    ``owners`` maps a location to the only thread allowed to store to it.
    """

    name: str
    threads: tuple[tuple[str, ThreadProgram], ...]
    initial: Mapping[Location, Any]
    check: Callable[[dict[str, Any], dict[Location, Any]], str | None]
    owners: Mapping[Location, str] = field(default_factory=dict)
    relaxed: frozenset[str] = frozenset({"producer"})


class Step(NamedTuple):
    """One scheduler choice: a thread executing ``op``, or a buffered store draining."""

    thread: str
    op: Any
    value: Any = None
    drain: bool = False

    def describe(self) -> str:
        if self.drain:
            return f"{self.thread:<9} commit  {_fmt_loc(self.op.loc)} = {self.op.value!r}"
        op = self.op
        if isinstance(op, Load):
            return f"{self.thread:<9} load    {_fmt_loc(op.loc)} -> {self.value!r}"
        if isinstance(op, Store):
            return f"{self.thread:<9} store   {_fmt_loc(op.loc)} = {op.value!r}"
        return f"{self.thread:<9} {type(op).__name__.lower()}"


def _fmt_loc(loc: Location) -> str:
    if isinstance(loc, tuple):
        return ".".join(str(part) for part in loc)
    return str(loc)


@dataclass
class ExplorationResult:
    """Outcome of ``explore``.

    ``schedules_explored`` counts complete executions reached, with
    executions that end in an already-visited state counted once.
    ``exhausted`` is False when the budget ran out before the search did;
    such a result is neither a pass nor a failure.
    """

    program: str
    model: MemoryModel
    schedules_explored: int = 0
    states: int = 0
    transitions: int = 0
    exhausted: bool = True
    violation: str | None = None
    trace: list[Step] | None = None

    @property
    def passed(self) -> bool:
        return self.exhausted and self.violation is None

    def format_trace(self) -> str:
        if not self.trace:
            return ""
        lines = [f"{i:3d}. {step.describe()}" for i, step in enumerate(self.trace, 1)]
        lines.append(f"     => {self.violation}")
        return "\n".join(lines)

    def summary(self) -> str:
        if self.violation is not None:
            verdict = f"VIOLATION: {self.violation}"
        elif not self.exhausted:
            verdict = "BUDGET EXHAUSTED (inconclusive)"
        else:
            verdict = "no violation"
        return (
            f"{self.program} [{self.model.value}]: {verdict} "
            f"({self.schedules_explored} executions, {self.states} states)"
        )


class _Threads:
    """Memoised ``history -> next operation`` for each thread."""

    def __init__(self, program: StepProgram) -> None:
        self.factories = dict(program.threads)
        self._ops: dict[tuple[str, tuple], Any] = {}
        self._live: dict[tuple[str, tuple], Generator] = {}

    def op_at(self, name: str, hist: tuple) -> Any:
        key = (name, hist)
        op = self._ops.get(key)
        if op is not None:
            return op
        gen = self._live.pop((name, hist[:-1]), None) if hist else None
        try:
            if gen is not None:
                op = gen.send(hist[-1])
            else:
                gen = self.factories[name]()
                op = next(gen)
                for result in hist:
                    op = gen.send(result)
        except StopIteration as stop:
            op = _Done(stop.value)
            gen = None
        except ModelBoundError:
            raise
        except Exception as exc:  # an assertion inside the model
            op = _Raised(exc)
            gen = None
        self._ops[key] = op
        if gen is not None:
            self._live[key] = gen
        return op


class _State(NamedTuple):
    mem: frozenset
    buffers: tuple  # per thread: tuple of pending (loc, value)
    hists: tuple  # per thread: tuple of results sent so far


class _Explorer:
    def __init__(self, program: StepProgram, model: MemoryModel) -> None:
        self.program = program
        self.model = model
        self.names = [name for name, _ in program.threads]
        self.threads = _Threads(program)
        relaxed = program.relaxed if model is MemoryModel.RELAX_WW else frozenset()
        self.relaxed = [name in relaxed for name in self.names]

    def initial(self) -> _State:
        n = len(self.names)
        return _State(frozenset(self.program.initial.items()), ((),) * n, ((),) * n)

    def ops(self, state: _State) -> list[Any]:
        return [self.threads.op_at(name, hist) for name, hist in zip(self.names, state.hists)]

    def successors(self, state: _State, ops: list[Any]) -> Iterable[tuple[Step, _State | str]]:
        """Enabled steps and the state each leads to (or an error string)."""
        mem = None
        for i, op in enumerate(ops):
            name = self.names[i]
            if isinstance(op, (_Done, _Raised)):
                continue
            if isinstance(op, Load):
                value = _lookup(state.buffers[i], op.loc)
                if value is _MISSING:
                    if mem is None:
                        mem = dict(state.mem)
                    value = mem.get(op.loc, NULL)
                yield Step(name, op, value), self._advance(state, i, value)
            elif isinstance(op, Store):
                owner = self.program.owners.get(op.loc)
                step = Step(name, op)
                if owner is not None and owner != name:
                    yield step, f"{name} stored to {_fmt_loc(op.loc)}, which only {owner} may write"
                    continue
                if self.relaxed[i]:
                    buffers = _replace(state.buffers, i, state.buffers[i] + ((op.loc, op.value),))
                    yield step, self._advance(state._replace(buffers=buffers), i, None)
                else:
                    yield step, self._advance(_write(state, op.loc, op.value), i, None)
            elif isinstance(op, Fence):
                if not state.buffers[i]:
                    yield Step(name, op), self._advance(state, i, None)
            elif isinstance(op, Quiesce):
                others_done = all(isinstance(o, (_Done, _Raised)) for j, o in enumerate(ops) if j != i)
                if others_done and not any(state.buffers):
                    yield Step(name, op), self._advance(state, i, None)
            else:
                raise TypeError(f"thread {name} yielded {op!r}, not an operation")
        for i, pending in enumerate(state.buffers):
            seen = set()
            for k, (loc, value) in enumerate(pending):
                if loc in seen:
                    continue
                seen.add(loc)
                buffers = _replace(state.buffers, i, pending[:k] + pending[k + 1 :])
                yield (
                    Step(self.names[i], Store(loc, value), drain=True),
                    _write(state._replace(buffers=buffers), loc, value),
                )

    @staticmethod
    def _advance(state: _State, i: int, result: Any) -> _State:
        return state._replace(hists=_replace(state.hists, i, state.hists[i] + (result,)))

    def verdict(self, state: _State, ops: list[Any]) -> str | None:
        """None if ``state`` is a clean terminal state, else the problem."""
        for name, op in zip(self.names, ops):
            if isinstance(op, _Raised):
                return f"{name} failed: {op.error!r}"
        results = {name: op.result for name, op in zip(self.names, ops)}
        return self.program.check(results, dict(state.mem))

    @staticmethod
    def terminal(state: _State, ops: list[Any]) -> bool:
        return all(isinstance(op, (_Done, _Raised)) for op in ops) and not any(state.buffers)


_MISSING = object()


def _lookup(pending: tuple, loc: Location) -> Any:
    for k in range(len(pending) - 1, -1, -1):
        if pending[k][0] == loc:
            return pending[k][1]
    return _MISSING


def _replace(items: tuple, i: int, value: Any) -> tuple:
    return items[:i] + (value,) + items[i + 1 :]


def _write(state: _State, loc: Location, value: Any) -> _State:
    mem = dict(state.mem)
    mem[loc] = value
    return state._replace(mem=frozenset(mem.items()))


def explore(program: StepProgram, model: MemoryModel, max_states: int = 2_000_000) -> ExplorationResult:
    """Depth-first search over every schedule of ``program`` under ``model``.

    Stops at the first violation and returns its schedule as ``trace``.
    Deterministic: the same program, model and budget give the same result.
    A ``ModelBoundError`` raised by a thread propagates: the instance is too
    small for the program, which is a set-up error rather than a verdict.
    """
    ex = _Explorer(program, model)
    result = ExplorationResult(program.name, model)
    root = ex.initial()
    seen = {root}
    path: list[Step] = []
    # frames of (iterator over successors, number of steps on the path to this state)
    stack: list[Any] = []

    def visit(state: _State) -> str | None:
        ops = ex.ops(state)
        if ex.terminal(state, ops) or any(isinstance(op, _Raised) for op in ops):
            result.schedules_explored += 1
            return ex.verdict(state, ops)
        succ = list(ex.successors(state, ops))
        if not succ:
            return "deadlock: no thread can take a step"
        stack.append((iter(succ), len(path)))
        return None

    problem = visit(root)
    while problem is None and stack:
        succ, depth = stack[-1]
        del path[depth:]
        nxt = next(succ, None)
        if nxt is None:
            stack.pop()
            continue
        step, child = nxt
        result.transitions += 1
        path.append(step)
        if isinstance(child, str):
            problem = child
        elif child not in seen:
            seen.add(child)
            if len(seen) > max_states:
                result.exhausted = False
                break
            problem = visit(child)
    result.states = len(seen)
    if problem is not None:
        result.violation = problem
        result.trace = list(path)
    return result


def replay(program: StepProgram, model: MemoryModel, trace: Iterable[Step]) -> str | None:
    """Re-execute a recorded schedule and return the violation it ends in, if any.

    Raises ``ValueError`` if a step of the schedule is not enabled.
    """
    ex = _Explorer(program, model)
    state = ex.initial()
    for n, wanted in enumerate(trace, 1):
        ops = ex.ops(state)
        for step, child in ex.successors(state, ops):
            if (
                step.thread == wanted.thread
                and step.drain == wanted.drain
                and type(step.op) is type(wanted.op)
                and step.op == wanted.op
            ):
                break
        else:
            raise ValueError(f"step {n} ({wanted.describe()}) is not enabled")
        if isinstance(child, str):
            return child
        state = child
    ops = ex.ops(state)
    if ex.terminal(state, ops) or any(isinstance(op, _Raised) for op in ops):
        return ex.verdict(state, ops)
    return None


def run_sequential(thread: ThreadProgram, memory: dict[Location, Any]) -> Any:
    """Run one thread alone against ``memory`` (updated in place); return its result."""
    gen = thread()
    try:
        op = next(gen)
        while True:
            if isinstance(op, Load):
                op = gen.send(memory.get(op.loc, NULL))
            elif isinstance(op, Store):
                memory[op.loc] = op.value
                op = gen.send(None)
            else:
                op = gen.send(None)
    except StopIteration as stop:
        return stop.value
