import random

import pytest

from spscq import EMPTY
from spscq.kinds import KINDS, STAGED_KINDS, make_channel
from spscq.verify.oracle import (
    OracleMismatch,
    check_codes,
    encode,
    oracle_check,
    random_codes,
    random_ops,
    reference_results,
)


@pytest.mark.parametrize("kind", sorted(set(KINDS) - STAGED_KINDS))
def test_round_trip_on_unstaged_kinds(kind):
    ops = [("push", "a"), ("pop",), ("pop",)]
    assert oracle_check(kind, ops)
    codes, items = encode(kind, ops)
    assert reference_results(codes, items) == [True, "a", EMPTY]


@pytest.mark.parametrize("kind", sorted(STAGED_KINDS))
def test_round_trip_on_staged_kinds(kind):
    assert oracle_check(kind, [("mpush", "a"), ("flush",), ("pop",), ("pop",)], stage_size=4)
    # without a flush the item is still staged
    assert oracle_check(kind, [("mpush", "a"), ("pop",)], stage_size=4)


def test_bounded_reference_rejects_the_third_push():
    ops = [("push", x) for x in "abc"]
    codes, items = encode("spsc", ops)
    assert reference_results(codes, items, capacity=2) == [True, True, False]
    assert oracle_check("spsc", ops, capacity=2)


def test_mpush_is_rejected_by_unstaged_kinds():
    with pytest.raises(ValueError):
        oracle_check("spsc", [("mpush", 1)])
    with pytest.raises(ValueError):
        oracle_check("nope", [])


def test_mismatch_reports_first_divergent_op(monkeypatch):
    real = make_channel

    def broken(kind, capacity, stage_size):
        ch = real(kind, capacity, stage_size)
        popped = []

        def pop():
            x = ch.pop()
            popped.append(x)
            return "junk" if len(popped) == 3 else x

        return type(ch)(ch.kind, ch.queue, ch.push, pop, ch.flush, ch.capacity, ch.stage_size)

    monkeypatch.setattr("spscq.verify.oracle.make_channel", broken)
    ops = [("push", 1), ("pop",), ("push", 2), ("pop",), ("pop",), ("push", 3)]
    with pytest.raises(OracleMismatch) as err:
        oracle_check("dspsc", ops)
    assert err.value.index == 4 and err.value.actual == "junk" and err.value.expected is EMPTY


def test_reference_staged_semantics():
    # capacity 4, K=2: x, y fill half; third batch does not fit
    P, O, F = 0, 1, 2
    codes = [P, P, P, P, P, P, P, O, O, P]
    assert reference_results(codes, None, capacity=4, stage_size=2) == [
        True, True, True, True, True, False, BufferError, 0, 1, True,
    ]


@pytest.mark.parametrize("kind", KINDS)
def test_random_sequences(kind):
    for seed in range(20):
        rng = random.Random(seed)
        cap = rng.randint(2, 10)
        assert oracle_check(kind, random_ops(2_000, rng, rng.uniform(0.4, 0.7)), cap, rng.randint(1, cap))


def test_random_codes_are_seeded():
    assert random_codes(50, random.Random(7)) == random_codes(50, random.Random(7))
    check_codes("uspsc", random_codes(5_000, random.Random(1)), capacity=2)
