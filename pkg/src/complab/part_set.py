"""Cofinite part sets S, their truncations, and the polynomial (1 - x) f(x).

A part set is stored by its finite complement (the excluded parts), so every
loop over S is a loop over a bounded integer range with the excluded values
skipped.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

__all__ = [
    "PartSet",
    "TruncatedPartSet",
    "DenominatorPolynomial",
    "make_part_set",
    "parse_exclude",
    "denominator_polynomial",
    "contains",
]


@dataclass(frozen=True)
class PartSet:
    """S = Z_+ minus ``excluded``; ``excluded`` must be nonempty and ascending."""

    excluded: tuple[int, ...]

    def __post_init__(self):
        if not self.excluded:
            raise ValueError("S must be a proper subset of the positive integers")
        if any(k < 1 for k in self.excluded):
            raise ValueError("excluded parts must be positive integers")
        if any(a >= b for a, b in zip(self.excluded, self.excluded[1:])):
            raise ValueError("excluded parts must be strictly ascending")
        object.__setattr__(self, "_excluded_set", frozenset(self.excluded))

    @property
    def max_excluded(self) -> int:
        return self.excluded[-1]

    def __contains__(self, k: int) -> bool:
        return k >= 1 and k not in self._excluded_set

    def parts_up_to(self, bound: int) -> list[int]:
        """Allowed parts k with 1 <= k <= bound, ascending."""
        ex = self._excluded_set
        return [k for k in range(1, bound + 1) if k not in ex]

    @property
    def min_part(self) -> int:
        k = 1
        while k in self._excluded_set:
            k += 1
        return k

    def to_json(self) -> dict:
        return {"excluded": list(self.excluded)}

    def __str__(self) -> str:
        return "S\\{" + ",".join(map(str, self.excluded)) + "}"


@dataclass(frozen=True)
class TruncatedPartSet:
    """S intersected with [1, beta]."""

    base: PartSet
    beta: int

    def __post_init__(self):
        if self.beta < 1:
            raise ValueError("beta must be a positive integer")
        if not self.parts():
            raise ValueError(
                f"S ∩ [1, {self.beta}] is empty for excluded={list(self.base.excluded)}"
            )

    def parts(self) -> list[int]:
        return self.base.parts_up_to(self.beta)

    def __contains__(self, k: int) -> bool:
        return 1 <= k <= self.beta and k in self.base

    def to_json(self) -> dict:
        return {"excluded": list(self.base.excluded), "beta": self.beta}


@dataclass(frozen=True)
class DenominatorPolynomial:
    """Integer coefficients c_0..c_{M+1} of (1 - x) f(x), ascending degree."""

    coefficients: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x):
        # Horner, works for float, complex and numpy arrays
        acc = 0 * x
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def derivative(self, x):
        acc = 0 * x
        for j in range(self.degree, 0, -1):
            acc = acc * x + j * self.coefficients[j]
        return acc


def make_part_set(excluded: Iterable[int]) -> PartSet:
    """Build a PartSet from any iterable of excluded parts (deduplicated, sorted)."""
    ks = [int(k) for k in excluded]
    if not ks:
        raise ValueError("S must be a proper subset of the positive integers")
    if any(k < 1 for k in ks):
        raise ValueError(f"excluded parts must be positive integers, got {sorted(ks)}")
    return PartSet(tuple(sorted(set(ks))))


def parse_exclude(text: str) -> PartSet:
    """Parse the CLI syntax ``"1,4"`` into S̄ = {1, 4}."""
    items = [t.strip() for t in text.split(",") if t.strip()]
    try:
        values = [int(t) for t in items]
    except ValueError:
        raise ValueError(f"invalid part-set syntax: {text!r}") from None
    return make_part_set(values)


def denominator_polynomial(ps: PartSet) -> DenominatorPolynomial:
    """Coefficients of 1 - 2x + (1 - x) * sum_{k in S̄} x^k."""
    M = ps.max_excluded
    c = [0] * (M + 2)
    c[0] += 1
    c[1] -= 2
    for k in ps.excluded:
        c[k] += 1
        c[k + 1] -= 1
    return DenominatorPolynomial(tuple(c))


def contains(ps: PartSet, k: int) -> bool:
    return k in ps
