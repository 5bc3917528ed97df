"""Acceptance criteria, each checked at its stated size and tolerance.

Every test prints one PASS/FAIL line (collected again in the terminal
summary) before asserting.
"""

import math
import os
import random
import time

from spscq import EMPTY, MultiPushRing, MultiPushUnboundedQueue, RingBuffer
from spscq.bench.runner import BenchConfig, run_microkernel, run_raw_pipeline
from spscq.bench.stats import compute_stats
from spscq.kinds import KINDS
from spscq.verify.explore import MemoryModel, explore
from spscq.verify.models import lamport_capacity, uspsc_program
from spscq.verify.oracle import OracleMismatch, check_codes, random_codes, semantics
from spscq.verify.stress import DelayModel, StressFailure, stress_fifo

DELAYS = {
    "none": (None, None),
    "producer-stalled": (DelayModel(rate=0.001, max_us=200, seed=1), None),
    "consumer-stalled": (None, DelayModel(rate=0.001, max_us=200, seed=2)),
}


def test_criterion_1_fifo_stress(criterion):
    failures, timings = [], {}
    for kind in KINDS:
        t0 = time.perf_counter()
        for name, (pd, cd) in DELAYS.items():
            try:
                stress_fifo(kind, 1_000_000, pd, cd)
            except StressFailure as exc:
                failures.append(f"{kind}/{name}: {exc}")
        timings[kind] = time.perf_counter() - t0
    slow = {k: round(t, 1) for k, t in timings.items() if t >= 10.0}
    ok = not failures and not slow
    detail = ", ".join(f"{k} {t:.1f}s" for k, t in timings.items())
    if failures:
        detail = "; ".join(failures)
    elif slow:
        detail = f"over 10 s per queue: {slow}"
    criterion(1, "1M-token FIFO stress, 5 kinds x 3 delay models", ok, detail)
    assert ok, detail


def test_criterion_2_oracle_equivalence(criterion):
    t0 = time.perf_counter()
    mismatch = None
    try:
        for seed in range(1_000):
            rng = random.Random(seed)
            capacity = rng.randint(2, 16)
            stage = rng.randint(1, capacity)
            codes = random_codes(10_000, rng, push_weight=rng.uniform(0.4, 0.7))
            shared: dict = {}
            for kind in KINDS:
                key = semantics(kind)
                shared[key] = check_codes(kind, codes, None, capacity, stage, shared.get(key))
    except OracleMismatch as exc:
        mismatch = f"seed {seed}: {exc}"
    elapsed = time.perf_counter() - t0
    ok = mismatch is None and elapsed < 30.0
    detail = mismatch or f"5 kinds x 1000 sequences x 10000 ops in {elapsed:.1f} s (limit 30 s)"
    criterion(2, "oracle equivalence", ok, detail)
    assert ok, detail


def test_criterion_3_explorer_scenarios(criterion):
    WW, SC = MemoryModel.RELAX_WW, MemoryModel.SC
    t0 = time.perf_counter()
    problems = []

    cap1 = explore(uspsc_program(1, 2), WW)
    if not (cap1.violation and "item 'a' lost" in cap1.violation):
        problems.append(f"capacity 1: expected loss of the first item, got {cap1.summary()}")

    for n in range(1, 5):
        r = explore(uspsc_program(2, n, max_buffers=2), WW)
        if not r.passed:
            problems.append(f"capacity 2: {r.summary()}")
            print(r.format_trace())
            break

    for cap, top in ((1, 2), (2, 4)):
        for n in range(1, top + 1):
            r = explore(uspsc_program(cap, n, max_buffers=2), SC)
            if not r.passed:
                problems.append(f"SC capacity {cap}: {r.summary()}")
    elapsed = time.perf_counter() - t0
    if elapsed >= 60.0:
        problems.append(f"took {elapsed:.1f} s")
    ok = not problems
    detail = "; ".join(problems) or f"capacity 1 loses 'a', capacity 2 clean for 1..4 items, SC clean ({elapsed:.1f} s)"
    criterion(3, "uSPSC exploration: capacity 1 fails, capacity 2 and SC pass", ok, detail)
    assert ok, detail


def test_criterion_4_capacity_semantics(criterion):
    got = {}
    for n in (1, 2, 4, 8):
        rb = RingBuffer(n)
        accepted = 0
        while accepted <= n and rb.push(accepted):
            accepted += 1
        got[n] = (accepted, lamport_capacity(n))
    ok = all(v == (n, n - 1) for n, v in got.items())
    detail = ", ".join(f"N={n}: ring {a}, lamport {b}" for n, (a, b) in got.items())
    criterion(4, "ring accepts N, Lamport model accepts N-1", ok, detail)
    assert ok, detail


def _staged_visibility(make, k, n_items, seed):
    """Drive mpush/flush with a draining consumer; return (order ok, worst delay, flush ok)."""
    rng = random.Random(seed)
    q = make()
    pushed_at, popped, worst, flush_ok = {}, [], 0, True
    calls = 0
    for i in range(n_items):
        assert q.mpush(i)
        calls += 1
        pushed_at[i] = calls
        if rng.random() < 0.05:
            assert q.flush()
            while (x := q.pop()) is not EMPTY:
                popped.append(x)
            flush_ok &= len(popped) == i + 1
            continue
        while (x := q.pop()) is not EMPTY:
            popped.append(x)
            worst = max(worst, calls - pushed_at[x])
    q.flush()
    while (x := q.pop()) is not EMPTY:
        popped.append(x)
    return popped == list(range(n_items)), worst, flush_ok


def test_criterion_5_multipush_order_and_latency(criterion):
    k = 16
    cases = {
        "mspsc": lambda: MultiPushRing(1024, k),
        "muspsc": lambda: MultiPushUnboundedQueue(64, stage_size=k),
    }
    results = {name: _staged_visibility(make, k, 20_000, seed) for seed, (name, make) in enumerate(cases.items())}
    # order under a ring that keeps filling up, against the bounded reference
    rng = random.Random(5)
    mismatch = None
    try:
        for kind in ("mspsc", "muspsc"):
            for _ in range(50):
                check_codes(kind, random_codes(2_000, rng, 0.6), None, 32, k)
    except OracleMismatch as exc:
        mismatch = str(exc)
    ok = mismatch is None and all(order and worst <= k - 1 and fl for order, worst, fl in results.values())
    detail = mismatch or ", ".join(
        f"{name}: order {'ok' if o else 'BROKEN'}, worst delay {w} further mpush calls, flush {'ok' if f else 'BROKEN'}"
        for name, (o, w, f) in results.items()
    )
    criterion(5, f"staged order = mpush order, visible within K-1={k - 1} mpush or one flush", ok, detail)
    assert ok, detail


def _cross_core():
    try:
        cpus = sorted(os.sched_getaffinity(0))
    except AttributeError:
        return None, None, "affinity unsupported; unpinned"
    if len(cpus) >= 2:
        return cpus[0], cpus[1], f"producer CPU {cpus[0]}, consumer CPU {cpus[1]}"
    return None, None, f"only CPU {cpus} available; unpinned"


def test_criterion_6_ordinal_performance(criterion):
    p, c, placement = _cross_core()
    kinds = ("spsc", "mspsc", "uspsc", "dspsc")
    n_items, runs = 20_000, 100
    verdicts, lines = [], []
    for rep in range(3):
        cfgs = {k: BenchConfig(k, capacity=1024, n_items=n_items, runs=1, producer_core=p, consumer_core=c) for k in kinds}
        for cfg in cfgs.values():
            run_raw_pipeline(cfg)  # warm-up
        times = {k: [] for k in kinds}
        for _ in range(runs):  # interleaved so slow drift hits every kind alike
            for k in kinds:
                times[k].extend(run_raw_pipeline(cfgs[k], warmup=False).run_times)
        mean = {k: compute_stats(times[k], n_items).mean_ns_per_op for k in kinds}
        checks = (
            mean["mspsc"] < mean["spsc"],
            mean["uspsc"] <= 2 * mean["spsc"],
            mean["dspsc"] >= 2 * mean["uspsc"],
        )
        verdicts.append(all(checks))
        lines.append(
            f"rep {rep + 1}: spsc {mean['spsc']:.0f}, mspsc {mean['mspsc']:.0f}, uspsc {mean['uspsc']:.0f}, "
            f"dspsc {mean['dspsc']:.0f} ns/transfer; mspsc<spsc {checks[0]}, uspsc<=2*spsc {checks[1]}, "
            f"dspsc>=2*uspsc {checks[2]} (ratio {mean['dspsc'] / mean['uspsc']:.2f})"
        )
    for line in lines:
        print(line)
    ok = sum(verdicts) >= 2
    detail = f"{sum(verdicts)}/3 repetitions hold; {placement}; " + " | ".join(lines)
    criterion(6, "ordinal latency: mspsc<spsc, uspsc<=2*spsc, dspsc>=2*uspsc (2 of 3)", ok, detail)
    assert ok, detail


def test_criterion_7_microkernel(criterion):
    problems = []
    for n in (1_000, 1_000_000):
        for kind in ("mspsc", "muspsc", "dspsc"):
            try:
                res = run_microkernel(BenchConfig(kind, capacity=1024, n_items=n, runs=1, bench="microkernel"), warmup=n < 10_000)
            except AssertionError as exc:
                problems.append(str(exc))
                continue
            if res.y_pipelined.hex() != res.y_sequential.hex():
                problems.append(f"{kind} n={n}: y differs")
    speed = {}
    for kind in ("mspsc", "muspsc", "dspsc"):
        res = run_microkernel(BenchConfig(kind, capacity=1024, n_items=200_000, runs=3, bench="microkernel"))
        speed[kind] = res.speedup
    ordered = speed["muspsc"] >= speed["mspsc"] >= speed["dspsc"]
    if not ordered:
        problems.append("speedup order muspsc >= mspsc >= dspsc not observed")
    ok = not problems
    detail = "; ".join(problems + [", ".join(f"{k} speedup {v:.3f}" for k, v in speed.items())])
    criterion(7, "microkernel y bitwise equal (n=1e3, 1e6) and speedup order", ok, detail)
    assert ok, detail


def test_criterion_8_pool_conservation(criterion):
    problems, seen = [], 0
    for kind in ("uspsc", "muspsc"):
        for capacity in (8, 1024):
            for name, (pd, cd) in DELAYS.items():
                r = stress_fifo(kind, 200_000, pd, cd, capacity=capacity, stage_size=min(16, capacity))
                c = r.census
                seen += 1
                if c["created"] != c["live"] + c["cached"] + c["deallocated"]:
                    problems.append(f"{kind}/{capacity}/{name}: {c}")
                if c["cached"] > 32:
                    problems.append(f"{kind}/{capacity}/{name}: cache holds {c['cached']} > 32")
    ok = not problems
    detail = "; ".join(problems) or f"{seen} stress runs: created = current + in-use + cached + deallocated, cache <= 32"
    criterion(8, "buffer pool conservation after stress", ok, detail)
    assert ok, detail
