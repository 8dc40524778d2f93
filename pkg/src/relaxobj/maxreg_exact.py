"""Exact bounded max register built from read/write registers only.

A capacity-M register is a tournament tree: the root owns a one-shot
switch register (written only with 1) and splits the value range between
a left child of capacity ceil(M/2) (values below the split) and a right
child of capacity floor(M/2) (values at or above it, stored relative to
the split).  A write for the upper half first records the remainder in
the right subtree and only then raises the switch, so a reader that sees
the switch up always finds the value that justified it; a write for the
lower half is dominated and abandoned as soon as it sees the switch up.
Both operations walk one root-to-leaf path, so every operation performs
at most ceil(log2 M) accesses and is wait-free unconditionally.
"""

from __future__ import annotations

from . import shmem


class _Node:
    __slots__ = ("capacity", "switch", "left", "right", "depth")

    def __init__(self, memory: shmem.Memory, capacity: int) -> None:
        self.capacity = capacity
        if capacity > 1:
            self.switch = memory.alloc(shmem.REGISTER, 0)
            self.left = _Node(memory, (capacity + 1) // 2)
            self.right = _Node(memory, capacity // 2)
            self.depth = 1 + max(self.left.depth, self.right.depth)
        else:
            self.switch = None
            self.left = None
            self.right = None
            self.depth = 0


def _write(node: _Node, v: int):
    if node.capacity == 1:
        return
    split = node.left.capacity
    if v >= split:
        yield from _write(node.right, v - split)
        yield ("write", node.switch, 1)
    elif (yield ("read", node.switch)) == 0:
        yield from _write(node.left, v)


def _read(node: _Node):
    if node.capacity == 1:
        return 0
    if (yield ("read", node.switch)) == 1:
        return node.left.capacity + (yield from _read(node.right))
    return (yield from _read(node.left))


class BoundedMaxRegister:
    """Wait-free linearizable max register over values [0, capacity).

    Operations: ``("write", (v,))`` and ``("read", ())``.  A read returns
    the maximum value of all writes linearized before it (0 if none).
    """

    def __init__(self, memory: shmem.Memory, capacity: int) -> None:
        if not isinstance(capacity, int) or capacity < 1:
            raise ValueError("capacity must be a positive integer")
        self.capacity = capacity
        self.root = _Node(memory, capacity)
        self.depth = self.root.depth  # == ceil(log2 capacity)

    def program(self, pid: int, op: str, args: tuple = ()):
        if op == "write":
            (v,) = args
            if not isinstance(v, int) or not 0 <= v < self.capacity:
                raise ValueError(f"write value {v!r} outside [0, {self.capacity})")
            return _write(self.root, v)
        if op == "read":
            return _read(self.root)
        raise ValueError(f"unknown operation {op!r}")
