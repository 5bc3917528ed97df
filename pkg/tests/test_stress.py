import pytest

from spscq.kinds import KINDS
from spscq.verify.stress import DelayModel, StressFailure, _describe, _segments, stress_fifo


def conserved(c):
    return c["created"] == c["live"] + c["cached"] + c["deallocated"]


@pytest.mark.parametrize("kind", KINDS)
def test_producer_stalls(kind):
    r = stress_fifo(kind, 100_000, producer_delay=DelayModel(rate=0.002, seed=11), capacity=8, stage_size=4)
    assert r.passed and r.received == 100_000
    assert r.items_per_second > 0 and r.ns_per_transfer > 0


@pytest.mark.parametrize("kind", KINDS)
def test_consumer_stalls(kind):
    r = stress_fifo(kind, 100_000, consumer_delay=DelayModel(rate=0.002, seed=12), capacity=8, stage_size=4)
    assert r.passed
    if r.census is not None:
        assert conserved(r.census) and r.census["cached"] <= 32


def test_delay_schedule_is_seeded_and_sparse():
    d = DelayModel(rate=0.01, max_us=50, seed=3)
    s = d.schedule(1_000)
    assert s == d.schedule(1_000) and len(s) == 10
    assert all(0 <= t <= 50e-6 for _, t in s)
    segs = _segments(1_000, d)
    assert segs[0][0] == 0 and segs[-1][1] == 1_000
    assert all(a[1] == b[0] for a, b in zip(segs, segs[1:]))


def test_broken_queue_is_caught_at_the_bad_index(monkeypatch):
    from spscq import kinds

    real = kinds.make_channel

    def lossy(kind, capacity, stage_size):
        ch = real(kind, capacity, stage_size)
        push = ch.push
        return type(ch)(ch.kind, ch.queue, lambda x: True if x == 500 else push(x), ch.pop, ch.flush, ch.capacity, None)

    monkeypatch.setattr("spscq.verify.stress.make_channel", lossy)
    with pytest.raises(StressFailure) as err:
        stress_fifo("spsc", 2_000, capacity=16)
    assert err.value.index == 500
    r = stress_fifo("spsc", 2_000, capacity=16, check=False)
    assert not r.passed and r.first_bad_index == 500 and "lost" in r.message


def test_describe():
    assert "lost" in _describe(7, 5)
    assert "again" in _describe(3, 5)
    assert "unexpected" in _describe("x", 5)


def test_rejects_empty_run():
    with pytest.raises(ValueError):
        stress_fifo("spsc", 0)
