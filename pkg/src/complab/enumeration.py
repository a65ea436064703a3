"""Brute-force enumeration of restricted compositions (oracle tier)."""
from __future__ import annotations

from typing import Iterator, Union

from .part_set import PartSet, TruncatedPartSet

Universe = Union[PartSet, TruncatedPartSet]


def enumerate_compositions(universe: Universe, n: int) -> Iterator[tuple[int, ...]]:
    """All compositions of n with parts in the universe, in lexicographic order."""
    if n < 0:
        return
    if isinstance(universe, TruncatedPartSet):
        parts = universe.parts()
    else:
        parts = universe.parts_up_to(n)
    stack: list[int] = []

    def rec(rest):
        if rest == 0:
            yield tuple(stack)
            return
        for k in parts:
            if k > rest:
                break
            stack.append(k)
            yield from rec(rest - k)
            stack.pop()

    yield from rec(n)


def enumerate_all_compositions(n: int) -> Iterator[tuple[int, ...]]:
    """All 2^(n-1) compositions of n via the ball-and-bar bijection.

    Bit i of the mask set means ball i + 1 is black (a part ends there); the
    last ball is always black.
    """
    if n == 0:
        yield ()
        return
    for mask in range(1 << (n - 1)):
        parts = []
        last = 0
        for i in range(n - 1):
            if mask >> i & 1:
                parts.append(i + 1 - last)
                last = i + 1
        parts.append(n - last)
        yield tuple(parts)
