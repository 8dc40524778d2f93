"""Relaxed-linearizability checker.

Decides whether a history admits a linearization: a total order of its
operations that extends the real-time precedence order (an operation
precedes another iff its response event appears before the other's
invocation event) and is accepted step by step by a sequential
specification.  Specifications may be relaxed: the response predicate
can accept a window of values rather than one exact answer.

Pending operations follow the usual completion convention: a pending
query is dropped; a pending update may have taken effect or not, so the
checker is free to include it or leave it out.

Two search routines are provided.  :func:`check` memoizes on (abstract
state, bitmask of linearized operations) and is the production path;
:func:`check_bruteforce` enumerates precedence-respecting permutations
outright and replays each one, serving as the ground-truth oracle for
small histories.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Callable

from .shmem import History, OpRecord

DEFAULT_STATE_BUDGET = 2_000_000


@dataclass(frozen=True)
class RelaxedSpec:
    """Sequential state machine with a (possibly relaxed) response predicate.

    ``apply(state, op, args)`` returns the post state; ``accepts(state,
    op, args, ret)`` judges a response against the pre state.  ``updates``
    names the operations that may linearize without having responded.
    """

    name: str
    initial: Any
    apply: Callable[[Any, str, tuple], Any]
    accepts: Callable[[Any, str, tuple, Any], bool]
    updates: frozenset[str]


def counter_spec(k: int) -> RelaxedSpec:
    """Counter whose reads may err by a factor k either way.

    A read returning x against exact count v is accepted iff
    v/k <= x <= v*k, evaluated as v <= x*k and x <= v*k in exact
    integers (no division, no floats).
    """
    if not isinstance(k, int) or k < 2:
        raise ValueError("accuracy factor k must be an integer >= 2")

    def apply(state, op, args):
        return state + 1 if op == "inc" else state

    def accepts(state, op, args, ret):
        if op == "inc":
            return True
        return state <= ret * k and ret <= state * k

    return RelaxedSpec(f"counter(k={k})", 0, apply, accepts, frozenset({"inc"}))


def maxreg_exact_spec() -> RelaxedSpec:
    """Exact max register: reads must return the running maximum."""

    def apply(state, op, args):
        return max(state, args[0]) if op == "write" else state

    def accepts(state, op, args, ret):
        if op == "write":
            return True
        return ret == state

    return RelaxedSpec("maxreg-exact", 0, apply, accepts, frozenset({"write"}))


def maxreg_approx_spec(k: int) -> RelaxedSpec:
    """Max register whose reads may overshoot by at most a factor k.

    Reads are accepted iff s <= x <= s*k for running maximum s; in
    particular x = 0 is accepted only while s = 0.
    """
    if not isinstance(k, int) or k < 2:
        raise ValueError("accuracy factor k must be an integer >= 2")

    def apply(state, op, args):
        return max(state, args[0]) if op == "write" else state

    def accepts(state, op, args, ret):
        if op == "write":
            return True
        return state <= ret <= state * k

    return RelaxedSpec(f"maxreg-approx(k={k})", 0, apply, accepts,
                       frozenset({"write"}))


def builtin_specs(k: int) -> dict[str, RelaxedSpec]:
    """The three specifications the harness checks objects against."""
    return {
        "counter": counter_spec(k),
        "maxreg-exact": maxreg_exact_spec(),
        "maxreg-approx": maxreg_approx_spec(k),
    }


@dataclass
class CheckResult:
    """Outcome of a linearizability check.

    ``verdict`` is one of valid / invalid / inconclusive; inconclusive
    means the state budget ran out and is never a false verdict.  A
    valid result carries a witness: the linearized operations in order.
    """

    verdict: str
    witness: list[OpRecord] | None
    states_explored: int

    @property
    def valid(self) -> bool:
        return self.verdict == "valid"

    def to_json(self) -> dict:
        doc: dict[str, Any] = {
            "verdict": self.verdict,
            "states_explored": self.states_explored,
        }
        if self.witness is not None:
            doc["witness"] = [
                {"proc": o.proc, "op": o.name, "args": list(o.args), "ret": o.ret}
                for o in self.witness
            ]
        return doc


class _BudgetExceeded(Exception):
    pass


def _usable_ops(history: History | list, spec: RelaxedSpec) -> list[OpRecord]:
    ops = history.operations() if isinstance(history, History) else list(history)
    return [o for o in ops if not o.pending or o.name in spec.updates]


def _precedence_masks(ops: list[OpRecord]) -> list[int]:
    """before[i] = bitmask of ops whose response precedes i's invocation."""
    before = [0] * len(ops)
    for i, oi in enumerate(ops):
        for j, oj in enumerate(ops):
            if i != j and oj.responded is not None and oj.responded < oi.invoked:
                before[i] |= 1 << j
    return before


def check(history: History | list, spec: RelaxedSpec,
          state_budget: int = DEFAULT_STATE_BUDGET) -> CheckResult:
    """Memoized exhaustive search for a linearization of ``history``.

    Sound and complete within the budget: "valid" comes with a witness
    that replays cleanly, "invalid" means no linearization exists, and
    a blown budget yields "inconclusive".
    """
    ops = _usable_ops(history, spec)
    before = _precedence_masks(ops)
    required = 0
    for i, o in enumerate(ops):
        if not o.pending:
            required |= 1 << i
    count = len(ops)
    failed: set[tuple[Any, int]] = set()
    explored = 0

    def search(state, mask) -> list[int] | None:
        nonlocal explored
        if mask & required == required:
            return []
        key = (state, mask)
        if key in failed:
            return None
        explored += 1
        if explored > state_budget:
            raise _BudgetExceeded
        for i in range(count):
            bit = 1 << i
            if mask & bit or before[i] & ~mask:
                continue
            o = ops[i]
            if not o.pending and not spec.accepts(state, o.name, o.args, o.ret):
                continue
            tail = search(spec.apply(state, o.name, o.args), mask | bit)
            if tail is not None:
                return [i] + tail
        failed.add(key)
        return None

    try:
        order = search(spec.initial, 0)
    except _BudgetExceeded:
        return CheckResult("inconclusive", None, explored)
    if order is None:
        return CheckResult("invalid", None, explored)
    return CheckResult("valid", [ops[i] for i in order], explored)


def check_bruteforce(history: History | list, spec: RelaxedSpec) -> CheckResult:
    """Oracle checker: enumerate permutations, then replay each in full.

    Permutations are generated respecting precedence only (never pruned
    by the specification), so the search structure is independent of the
    response predicate.  Exponential; desk-scale histories only.
    """
    ops = _usable_ops(history, spec)
    before = _precedence_masks(ops)
    completed = [i for i, o in enumerate(ops) if not o.pending]
    optional = [i for i, o in enumerate(ops) if o.pending]
    explored = 0

    def orderings(remaining: list[int], placed: int):
        # precedence-respecting permutations; no pruning by the spec
        if not remaining:
            yield []
            return
        for i in remaining:
            if before[i] & ~placed:
                continue
            rest = [x for x in remaining if x != i]
            for tail in orderings(rest, placed | (1 << i)):
                yield [i] + tail

    def replays(order: list[int]) -> bool:
        state = spec.initial
        for i in order:
            o = ops[i]
            if not o.pending and not spec.accepts(state, o.name, o.args, o.ret):
                return False
            state = spec.apply(state, o.name, o.args)
        return True

    for extra_count in range(len(optional) + 1):
        for extra in itertools.combinations(optional, extra_count):
            chosen = sorted(completed + list(extra))
            for order in orderings(chosen, 0):
                explored += 1
                if replays(order):
                    return CheckResult("valid", [ops[i] for i in order], explored)
    return CheckResult("invalid", None, explored)
