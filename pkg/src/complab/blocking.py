"""Blocking decomposition of β-bounded compositions.

For a composition λ of n and h = ⌊n/m⌋, the divider parts are the parts
covering ball positions h, 2h, ..., mh (balls are 1-indexed; part t covers
positions λ_1 + ... + λ_{t-1} + 1 through λ_1 + ... + λ_t).  Removing them
leaves blocks Π_1, ..., Π_{m+1}.  Compositions sharing the vector W of
(block sum, block start) pairs form a class whose size is the product of
the truncated counts of the block sums.
"""
from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .counting import _exact_counts
from .enumeration import enumerate_compositions
from .part_set import TruncatedPartSet

__all__ = [
    "BlockingParameters",
    "BlockDecomposition",
    "DecompositionError",
    "default_parameters",
    "default_beta",
    "decompose",
    "reconstruct",
    "class_size",
    "IndependenceReport",
    "conditional_independence_check",
    "DEFAULT_BETA_MULTIPLIER",
    "DEFAULT_ENUMERATION_CAP",
]

DEFAULT_BETA_MULTIPLIER = 5.0
DEFAULT_ENUMERATION_CAP = 10_000_000


class DecompositionError(ValueError):
    pass


@dataclass(frozen=True)
class BlockingParameters:
    m: int
    beta: int
    valid: bool  # ⌊n/m⌋ > 2β


def default_beta(n: int, p: float, multiplier: float = DEFAULT_BETA_MULTIPLIER) -> int:
    """β = ⌊c log_{1/p} n⌋."""
    return math.floor(multiplier * math.log(n) / math.log(1.0 / p))


def default_parameters(n: int, p: float, multiplier: float = DEFAULT_BETA_MULTIPLIER) -> BlockingParameters:
    """m = ⌊n^{1/3} / (c log_{1/p} n)^{2/3}⌋ and β = ⌊c log_{1/p} n⌋ with c = ``multiplier``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    L = multiplier * math.log(n) / math.log(1.0 / p)
    beta = default_beta(n, p, multiplier)
    m = math.floor(n ** (1.0 / 3.0) / L ** (2.0 / 3.0))
    if m == 0:
        raise ValueError(f"n={n} is below the blocking regime (m = 0)")
    return BlockingParameters(m, beta, n // m > 2 * beta)


@dataclass(frozen=True)
class BlockDecomposition:
    n: int
    m: int
    beta: int
    tau: tuple[int, ...]  # 1-indexed positions of the divider parts
    pi0: tuple[int, ...]
    blocks: tuple[tuple[int, ...], ...]  # Π_1 .. Π_{m+1}
    W: tuple[tuple[int, int], ...]  # (π_i, p_i) for i = 1..m+1

    def block_sums(self) -> tuple[int, ...]:
        return tuple(w[0] for w in self.W)

    def block_log_products(self) -> list[float]:
        """log B(Π_i) for i = 0..m+1 (empty blocks give 0)."""
        return [math.fsum(math.log(k) for k in b) for b in (self.pi0,) + self.blocks]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "beta": self.beta,
            "tau": list(self.tau),
            "pi0": list(self.pi0),
            "blocks": [list(b) for b in self.blocks],
            "W": [list(w) for w in self.W],
        }


def decompose(c: Sequence[int], m: int, beta: int, strict: bool = False) -> BlockDecomposition:
    """Split ``c`` into the divider parts Π_0 and blocks Π_1..Π_{m+1}.

    ``strict`` demands ⌊n/m⌋ > 2β.  Otherwise any instance whose divider
    positions τ_1 < ... < τ_m are strictly increasing is accepted.
    """
    parts = [int(k) for k in c]
    if m < 1:
        raise DecompositionError("m must be a positive integer")
    if not parts or min(parts) < 1:
        raise DecompositionError("composition must be a nonempty sequence of positive parts")
    if max(parts) > beta:
        raise DecompositionError(f"part {max(parts)} exceeds beta={beta}")
    n = sum(parts)
    h = n // m
    if h == 0:
        raise DecompositionError(f"m={m} exceeds n={n}")
    if strict and not h > 2 * beta:
        raise DecompositionError(f"strict mode needs ⌊n/m⌋ = {h} > 2β = {2 * beta}")
    cum = np.cumsum(parts)
    targets = h * np.arange(1, m + 1)
    # τ_i = min{t : λ_1 + ... + λ_t >= i h}, 1-indexed
    tau = tuple(int(t) + 1 for t in np.searchsorted(cum, targets, side="left"))
    if any(a >= b for a, b in zip(tau, tau[1:])):
        raise DecompositionError(f"divider positions collide: tau={tau}")
    pi0 = tuple(parts[t - 1] for t in tau)
    bounds = (0,) + tau
    blocks = [tuple(parts[bounds[i]: bounds[i + 1] - 1]) for i in range(m)]
    blocks.append(tuple(parts[tau[-1]:]))
    W = []
    for i, blk in enumerate(blocks):
        start = 1 if i == 0 else int(cum[tau[i - 1] - 1]) + 1
        W.append((sum(blk), start))
    return BlockDecomposition(n, m, beta, tau, pi0, tuple(blocks), tuple(W))


def block_log_sums(parts: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Fast path for (L_0, L_1, ..., L_{m+1}) and the block sums π_1..π_{m+1}.

    Same decomposition as :func:`decompose`, computed on arrays without
    materialising the blocks.  Assumes the divider positions are distinct.
    """
    parts = np.asarray(parts)
    n = int(parts.sum())
    h = n // m
    cum = np.cumsum(parts)
    logcum = np.concatenate(([0.0], np.cumsum(np.log(parts))))
    tau = np.searchsorted(cum, h * np.arange(1, m + 1), side="left") + 1
    divider_logs = np.log(parts[tau - 1])
    starts = np.concatenate(([0], tau))  # block i covers parts starts[i]+1 .. tau_i - 1
    ends = np.concatenate((tau - 1, [len(parts)]))
    L = np.empty(m + 2)
    L[0] = divider_logs.sum()
    L[1:] = logcum[ends] - logcum[starts]
    cum0 = np.concatenate(([0], cum))
    sums = cum0[ends] - cum0[starts]
    return L, sums


def reconstruct(bd: BlockDecomposition) -> tuple[int, ...]:
    """Interleave Π_1, Π_0[1], Π_2, ..., Π_0[m], Π_{m+1}."""
    if len(bd.pi0) != bd.m or len(bd.blocks) != bd.m + 1:
        raise DecompositionError("inconsistent decomposition shape")
    out: list[int] = []
    for blk, div in zip(bd.blocks, bd.pi0):
        out.extend(blk)
        out.append(div)
    out.extend(bd.blocks[-1])
    if sum(out) != bd.n:
        raise DecompositionError("parts do not sum to n")
    for (pi, start), blk in zip(bd.W, bd.blocks):
        if sum(blk) != pi:
            raise DecompositionError("block sum disagrees with W")
    return tuple(out)


def class_size(W: Sequence[tuple[int, int]], tps: TruncatedPartSet) -> int:
    """|Λ_W| = prod_i |Λ^β_{π_i}| (exact)."""
    sums = [w[0] for w in W]
    A = _exact_counts(tps, max(sums))
    return math.prod(A[s] for s in sums)


@dataclass
class IndependenceReport:
    n: int
    m: int
    beta: int
    total: int
    classes: int
    class_size_ok: bool
    factorization_ok: bool
    marginal_ok: bool
    partition_ok: bool
    counterexample: dict | None = None

    @property
    def passed(self) -> bool:
        return self.class_size_ok and self.factorization_ok and self.marginal_ok and self.partition_ok

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "beta": self.beta,
            "compositions": self.total,
            "classes": self.classes,
            "class_size_ok": self.class_size_ok,
            "factorization_ok": self.factorization_ok,
            "marginal_ok": self.marginal_ok,
            "partition_ok": self.partition_ok,
            "passed": self.passed,
            "counterexample": self.counterexample,
        }


def _block_product_law(tps: TruncatedPartSet, s: int) -> Counter:
    """Counts of B over Λ^β_s, keyed by the integer product."""
    return Counter(math.prod(c) for c in enumerate_compositions(tps, s))


def conditional_independence_check(
    tps: TruncatedPartSet, n: int, m: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> IndependenceReport:
    """Exhaustive check of the class-size formula and conditional independence.

    Every composition of Λ_n^β is decomposed and grouped by W.  Within each
    class the joint law of the block products (B(Π_1), ..., B(Π_{m+1})) must
    be the product of its marginals, each marginal must equal the law of B on
    Λ^β_{π_i}, and the class size must equal prod |Λ^β_{π_i}|.  All
    comparisons are exact integer identities; block products are compared
    as integers, which is equivalent to comparing their logarithms.
    """
    total = _exact_counts(tps, n)[n]
    if total > cap:
        raise ValueError(f"|Λ_n^β| = {total} exceeds the enumeration cap {cap}")

    joint: dict[tuple, Counter] = defaultdict(Counter)
    seen = 0
    for comp in enumerate_compositions(tps, n):
        bd = decompose(comp, m, tps.beta, strict=False)
        joint[bd.W][tuple(math.prod(b) for b in bd.blocks)] += 1
        seen += 1

    report = IndependenceReport(n, m, tps.beta, seen, len(joint), True, True, True, seen == total)
    laws: dict[int, Counter] = {}
    counts = _exact_counts(tps, n)
    for W, tally in joint.items():
        size = sum(tally.values())
        expected = math.prod(counts[w[0]] for w in W)
        if size != expected:
            report.class_size_ok = False
            report.counterexample = {"W": [list(w) for w in W], "class_size": size, "product_formula": expected}
            return report
        k = len(W)
        marginals = [Counter() for _ in range(k)]
        for values, cnt in tally.items():
            for i, v in enumerate(values):
                marginals[i][v] += cnt
        # Q(all L_i = y_i | W) = prod_i Q(L_i = y_i | W)  <=>  N(y) size^{k-1} = prod_i N_i(y_i)
        for values in product(*(sorted(mg) for mg in marginals)):
            lhs = tally.get(values, 0) * size ** (k - 1)
            rhs = math.prod(marginals[i][v] for i, v in enumerate(values))
            if lhs != rhs:
                report.factorization_ok = False
                report.counterexample = {
                    "W": [list(w) for w in W],
                    "block_products": list(values),
                    "joint": str(Fraction(tally.get(values, 0), size)),
                    "product_of_marginals": str(Fraction(rhs, size**k)),
                }
                return report
        for i, (pi, _) in enumerate(W):
            if pi not in laws:
                laws[pi] = _block_product_law(tps, pi) if pi > 0 else Counter({1: 1})
            law = laws[pi]
            block_total = counts[pi]
            for v in set(law) | set(marginals[i]):
                if marginals[i][v] * block_total != law[v] * size:
                    report.marginal_ok = False
                    report.counterexample = {"W": [list(w) for w in W], "block": i + 1, "product": v}
                    return report
    return report
