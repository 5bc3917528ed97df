from collections import deque

from hypothesis import given, strategies as st

from spscq import EMPTY, DynQueue


def test_fresh_queue_is_empty():
    q = DynQueue()
    assert q.empty() and q.pop() is EMPTY
    assert q.allocs == 1  # the dummy node


def test_round_trip():
    q = DynQueue()
    for x in "abc":
        assert q.push(x)
    assert list(q) == ["a", "b", "c"] and len(q) == 3
    assert [q.pop() for _ in range(4)] == ["a", "b", "c", EMPTY]


def test_head_never_holds_a_live_payload():
    q = DynQueue(4)
    q.push(1), q.push(2)
    q.pop()
    assert q._head.data is EMPTY


def test_recycled_node_is_reused_and_scrubbed():
    q = DynQueue(4)
    q.push("a")
    q.pop()
    assert q.cached_nodes() == 1
    cached = q._cache._buf[0]
    assert cached.data is EMPTY and cached.next is None
    allocs = q.allocs
    q.push("b")
    assert q.allocs == allocs
    assert q._tail is cached


def test_steady_state_does_not_allocate():
    q = DynQueue(64)
    for _ in range(10):  # warm-up
        for i in range(64):
            q.push(i)
        for _ in range(64):
            q.pop()
    allocs = q.allocs
    for _ in range(100):
        for i in range(64):
            q.push(i)
        for _ in range(64):
            q.pop()
    assert q.allocs == allocs


def test_node_cache_bounded_over_a_million_pairs():
    q, high = DynQueue(64), 0
    for i in range(1_000_000):
        q.push(i)
        assert q.pop() == i
        if i % 1000 == 0:
            high = max(high, q.cached_nodes())
    assert high <= 64


def test_full_cache_counts_frees():
    q = DynQueue(2)
    for i in range(6):
        q.push(i)
    for _ in range(6):
        q.pop()
    assert q.cached_nodes() == 2
    assert q.frees == 4
    assert q.allocs - q.frees - q.cached_nodes() == 1  # the current dummy


@given(st.lists(st.one_of(st.integers(), st.none())), st.lists(st.booleans()))
def test_matches_deque(values, plan):
    q, ref, it = DynQueue(3), deque(), iter(values)
    for push in plan:
        if push:
            v = next(it, 0)
            q.push(v)
            ref.append(v)
        else:
            assert q.pop() == (ref.popleft() if ref else EMPTY)
        assert q.empty() is (not ref)
