"""Wait-free multiplicatively accurate unbounded counter.

The shared state is an unbounded ladder of one-shot test&set bits plus
an announce array of pair registers, one per process.  Bit 0 stands for
one increment; past it the ladder is partitioned into intervals of k
bits, and each bit set within interval q (indices qk+1 .. (q+1)k)
stands for k**(q+1) increments performed by whoever set it.

Increments are counted privately in ``lcounter`` until it reaches the
announce threshold ``limit`` (always a power of k); the process then
tries to publish the batch by claiming one bit of the interval matching
its threshold, walking at most the k bits of that interval.  Claiming a
bit resets the private count and publishes (bit index, sequence number)
in the announce array; exhausting the interval without a claim means
enough other announcements happened that the batch can be abandoned to
the error margin, and the threshold grows by a factor k.

Reads walk the ladder visiting only the first and last bit of each
interval (plus bit 0), resuming from where the previous read stopped,
and derive the result from the last bit they confirmed set.  Because
concurrent increments could keep extending the ladder forever, a read
snapshots the announce sequence numbers after its first n iterations
and thereafter rescans every n iterations: a sequence number that grew
by two or more proves some bit was claimed entirely inside this read's
interval, so the read adopts that bit's value and terminates.  Both
operations are therefore wait-free: an increment performs at most k
test&set attempts plus one announce write, and a read is bounded once
any single process claims two more bits.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import shmem


def return_value(p: int, q: int, k: int) -> int:
    """Counter value encoded by a confirmed ladder bit at index q*k + p.

    Sums the increments guaranteed by bit 0 (one), by the k bits of each
    full interval below q (k**(l+1) each), and by p bits of interval q
    itself, then scales by k to center the estimate in the accuracy
    window.  Pure arithmetic; charges no steps.
    """
    if k < 2 or p < 0 or q < 0:
        raise ValueError("need k >= 2 and p, q >= 0")
    ret = 1 + p * k ** (q + 1)
    for l in range(1, q + 1):
        ret += k ** (l + 1)
    return k * ret


@dataclass
class ProcessState:
    """Persistent per-process counter variables."""

    lcounter: int = 0  # increments not yet announced
    limit: int = 1  # announce threshold, always k**limit_exp
    limit_exp: int = 0
    sn: int = 0  # announcements made so far (sequence number)
    l0: int = 1  # scan start offset within the current interval, in [1, k]
    last: int = 0  # highest ladder index this process has read
    last_confirmed: int | None = None  # highest ladder index this process saw set


class ApproxCounter:
    """k-multiplicative-accurate counter shared by n processes.

    Operations: ``("inc", ())`` and ``("read", ())``.  Reads return 0 or
    k times an achievable announcement total; with k >= sqrt(n) the
    amortized number of shared-memory steps per operation is constant.

    Accuracy caveat: the construction is permitted for any k >= 2, but
    the k-window on reads is only guaranteed once k*k >= n, and in the
    low-count regime (only ladder bit 0 set) a read returning k can
    undershoot the window unless k >= n - 1, because up to 1 + n*(k-1)
    increments can hide in private counters behind a single set bit.
    ``accuracy_guaranteed`` reflects the k*k >= n threshold; the checker
    reports any window violations either way.
    """

    def __init__(self, memory: shmem.Memory, n: int, k: int) -> None:
        if not isinstance(n, int) or n < 1:
            raise ValueError("process count n must be a positive integer")
        if not isinstance(k, int) or k < 2:
            raise ValueError("accuracy factor k must be an integer >= 2")
        self.n = n
        self.k = k
        self.accuracy_guaranteed = k * k >= n
        self.switches = shmem.GrowableBitArray(memory)
        self.announce = [memory.alloc(shmem.PAIR, (0, 0)) for _ in range(n)]
        self.states = [ProcessState() for _ in range(n)]

    def program(self, pid: int, op: str, args: tuple = ()):
        if not 0 <= pid < self.n:
            raise ValueError(f"process id {pid} outside [0, {self.n})")
        if op == "inc":
            return self._inc(pid)
        if op == "read":
            return self._read(pid)
        raise ValueError(f"unknown operation {op!r}")

    def _inc(self, pid: int):
        st = self.states[pid]
        k = self.k
        st.lcounter += 1
        if st.lcounter != st.limit:
            return
        j = st.limit_exp  # limit == k**j == lcounter
        if j > 0:
            for index in range((j - 1) * k + st.l0, j * k + 1):
                if (yield ("tas", self.switches.cell(index))) == 0:
                    st.sn += 1
                    yield ("write", self.announce[pid], (index, st.sn))
                    st.lcounter = 0
                    if index == j * k:
                        st.limit *= k
                        st.limit_exp += 1
                    st.l0 = 1 + index % k
                    return
            st.l0 = 1
        else:
            if (yield ("tas", self.switches.cell(0))) == 0:
                st.lcounter = 0
        st.limit *= k
        st.limit_exp += 1

    def _read(self, pid: int):
        st = self.states[pid]
        k = self.k
        n = self.n
        iterations = 0
        baseline = None  # announce sequence numbers at the first boundary
        while (yield ("read", self.switches.cell(st.last))) != 0:
            st.last_confirmed = st.last
            if st.last % k == 0:
                st.last += 1
            else:
                st.last += k - 1
            iterations += 1
            # Helping is vacuous solo: a process cannot advance its own
            # sequence number while it is reading.
            if n > 1 and iterations % n == 0:
                if iterations == n:
                    baseline = []
                    for other in range(n):
                        pair = yield ("read", self.announce[other])
                        baseline.append(pair[1])
                else:
                    for other in range(n):
                        index, sn = yield ("read", self.announce[other])
                        if sn - baseline[other] >= 2:
                            return return_value(index % k, index // k, k)
        if st.last_confirmed is None:
            return 0
        return return_value(st.last_confirmed % k, st.last_confirmed // k, k)

    # inspection helpers (simulator-level, never charge steps)

    def switch_values(self) -> list[int]:
        return self.switches.values()

    def set_indexes(self) -> list[int]:
        return [i for i, v in enumerate(self.switches.values()) if v]

    def switch_oid_to_index(self) -> dict[int, int]:
        return self.switches.oid_to_index()

    def announce_oid_to_proc(self) -> dict[int, int]:
        return {cell.oid: p for p, cell in enumerate(self.announce)}
