"""Relaxed-linearizability checker."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relaxobj import (builtin_specs, check, check_bruteforce, counter_spec,
                      maxreg_approx_spec, maxreg_exact_spec)
from relaxobj.shmem import Event, History


def H(*events):
    """Shorthand history: ('i'|'r', proc, op, payload)."""
    kinds = {"i": "invoke", "r": "respond"}
    return History([Event(kinds[k], proc, op, payload, step)
                    for step, (k, proc, op, payload) in enumerate(events)])


def test_sequential_exact_maxreg_valid():
    h = H(("i", 0, "write", (3,)), ("r", 0, "write", None),
          ("i", 0, "write", (7,)), ("r", 0, "write", None),
          ("i", 0, "read", ()), ("r", 0, "read", 7))
    result = check(h, maxreg_exact_spec())
    assert result.valid
    assert [o.name for o in result.witness] == ["write", "write", "read"]


def test_counter_read_too_large_invalid():
    # one inc fully precedes a read returning 5: x <= v*k needs v >= 3
    h = H(("i", 0, "inc", ()), ("r", 0, "inc", None),
          ("i", 1, "read", ()), ("r", 1, "read", 5))
    assert check(h, counter_spec(2)).verdict == "invalid"


def test_counter_concurrent_read_valid():
    # read returning 4 concurrent with a single inc: linearize inc first
    h = H(("i", 1, "read", ()), ("i", 0, "inc", ()),
          ("r", 0, "inc", None), ("r", 1, "read", 4))
    result = check(h, counter_spec(4))
    assert result.valid
    assert [o.name for o in result.witness] == ["inc", "read"]


def test_builtin_window_predicates():
    specs = builtin_specs(4)
    counter = specs["counter"]
    assert counter.accepts(5, "read", (), 20)  # 5/4 <= 20 <= 20
    assert not counter.accepts(5, "read", (), 21)
    assert counter.accepts(0, "read", (), 0)
    assert not counter.accepts(1, "read", (), 0)
    exact = specs["maxreg-exact"]
    assert exact.accepts(0, "read", (), 0)
    assert not exact.accepts(3, "read", (), 2)
    approx = specs["maxreg-approx"]
    assert approx.accepts(3, "read", (), 4)
    assert approx.accepts(3, "read", (), 12)
    assert not approx.accepts(3, "read", (), 2)  # no undershoot
    assert not approx.accepts(0, "read", (), 1)
    assert approx.accepts(0, "read", (), 0)


def test_witness_respects_precedence_and_replays():
    h = H(("i", 0, "inc", ()), ("r", 0, "inc", None),
          ("i", 0, "inc", ()), ("i", 1, "read", ()),
          ("r", 1, "read", 2), ("r", 0, "inc", None),
          ("i", 1, "read", ()), ("r", 1, "read", 2))
    spec = counter_spec(2)
    result = check(h, spec)
    assert result.valid
    witness = result.witness
    assert len(witness) == len(h.operations())  # everything completed
    for i, a in enumerate(witness):
        for b in witness[i + 1:]:
            # nothing later in the witness may precede a in real time
            assert b.responded is None or b.responded > a.invoked
    state = spec.initial
    for o in witness:
        assert spec.accepts(state, o.name, o.args, o.ret)
        state = spec.apply(state, o.name, o.args)


def test_pending_update_may_count_either_way():
    # pending inc: a read of 1 needs it included, a read of 0 needs it dropped
    for ret, expected in [(1, "valid"), (0, "valid")]:
        h = H(("i", 0, "inc", ()),
              ("i", 1, "read", ()), ("r", 1, "read", ret))
        assert check(h, counter_spec(2)).verdict == expected
    # but it cannot count twice
    h = H(("i", 0, "inc", ()),
          ("i", 1, "read", ()), ("r", 1, "read", 2),
          ("i", 1, "read", ()), ("r", 1, "read", 5))
    assert check(h, counter_spec(2)).verdict == "invalid"


def test_pending_read_is_dropped():
    h = H(("i", 0, "read", ()),
          ("i", 1, "inc", ()), ("r", 1, "inc", None))
    result = check(h, counter_spec(2))
    assert result.valid
    assert all(o.name != "read" for o in result.witness)


def test_inconclusive_on_tiny_budget():
    events = []
    for i in range(6):
        events.append(("i", i, "inc", ()))
    for i in range(6):
        events.append(("r", i, "inc", None))
    h = H(*events)
    result = check(h, counter_spec(2), state_budget=3)
    assert result.verdict == "inconclusive"
    # never a false verdict: full budget says valid
    assert check(h, counter_spec(2)).valid


def test_bruteforce_matches_examples():
    h = H(("i", 0, "inc", ()), ("r", 0, "inc", None),
          ("i", 1, "read", ()), ("r", 1, "read", 5))
    assert check_bruteforce(h, counter_spec(2)).verdict == "invalid"
    h2 = H(("i", 1, "read", ()), ("i", 0, "inc", ()),
           ("r", 0, "inc", None), ("r", 1, "read", 4))
    assert check_bruteforce(h2, counter_spec(4)).valid


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**9))
def test_checker_agrees_with_bruteforce_on_random_histories(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    events: list[tuple] = []
    open_op: dict[int, str] = {}
    for _ in range(rng.randint(2, 10)):
        proc = rng.randrange(n)
        if proc in open_op and rng.random() < 0.6:
            name = open_op.pop(proc)
            ret = None if name == "inc" else rng.choice([0, 1, 2, 3, 4, 6, 8])
            events.append(("r", proc, name, ret))
        elif proc not in open_op:
            name = rng.choice(["inc", "read"])
            open_op[proc] = name
            events.append(("i", proc, name, ()))
    h = H(*events)
    k = rng.choice([2, 4])
    fast = check(h, counter_spec(k))
    slow = check_bruteforce(h, counter_spec(k))
    assert fast.verdict == slow.verdict


def test_check_accepts_json_history():
    h = H(("i", 0, "inc", ()), ("r", 0, "inc", None),
          ("i", 0, "read", ()), ("r", 0, "read", 2))
    parsed = History.from_json(h.to_json())
    result = check(parsed, counter_spec(2))
    assert result.valid
    doc = result.to_json()
    assert doc["verdict"] == "valid"
    assert doc["states_explored"] >= 0
    assert {"proc", "op", "args", "ret"} <= set(doc["witness"][0])


def test_spec_validation():
    with pytest.raises(ValueError):
        counter_spec(1)
    with pytest.raises(ValueError):
        maxreg_approx_spec(0)
