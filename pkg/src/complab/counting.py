"""Exact and scaled counts of S-restricted compositions and moment recurrences.

Counts A_n = |Λ_n| satisfy A_0 = 1, A_n = sum_{k in S, k <= n} A_{n-k}.  The
big-integer tables use running prefix sums so each step costs O(1 + |S̄|)
additions.  For large n the counts are carried as c_n = A_n p^n, which
converges to 1 / sum_{k in S} k p^k.

Moments of log B come from the same first-part recurrence, run on moments
normalised by A_n so everything stays in floating range.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from .part_set import PartSet, TruncatedPartSet
from .roots import principal_root, truncated_principal_root

__all__ = [
    "ExactCountTable",
    "ScaledCountTable",
    "LogMomentTable",
    "AsymptoticCount",
    "count_exact",
    "count_truncated",
    "count_asymptotic",
    "scaled_counts",
    "power_moment_sum",
    "expected_power",
    "log_moment_table",
    "universe_root",
    "DEFAULT_EXACT_LIMIT",
]

Universe = Union[PartSet, TruncatedPartSet]

DEFAULT_EXACT_LIMIT = 2000
_EXACT_HEAD = 200

# C(t, j) for t <= 4
BINOMIAL = (
    (1,),
    (1, 1),
    (1, 2, 1),
    (1, 3, 3, 1),
    (1, 4, 6, 4, 1),
)


@dataclass(frozen=True)
class ExactCountTable:
    part_set: dict
    counts: tuple[int, ...]

    def __getitem__(self, n: int) -> int:
        return self.counts[n]

    def __len__(self) -> int:
        return len(self.counts)


@dataclass(frozen=True)
class ScaledCountTable:
    """c_n = A_n p^n for n = 0..N."""

    p: float
    c: np.ndarray = field(repr=False)

    def ratio(self, n: int, k: int) -> float:
        """A_{n-k} / A_n."""
        return self.c[n - k] * self.p**k / self.c[n]

    def __len__(self) -> int:
        return len(self.c)


@dataclass(frozen=True)
class AsymptoticCount:
    """Leading-term estimate of |Λ_n|; ``value`` is None when it overflows."""

    n: int
    log_value: float
    value: float | None


def universe_root(universe: Universe) -> float:
    if isinstance(universe, TruncatedPartSet):
        return truncated_principal_root(universe)
    return principal_root(universe)


def _exact_counts(universe: Universe, n_max: int) -> list[int]:
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if isinstance(universe, TruncatedPartSet):
        excluded = [k for k in universe.base.excluded if k <= universe.beta]
        beta = universe.beta
    else:
        excluded = list(universe.excluded)
        beta = None
    A = [0] * (n_max + 1)
    A[0] = 1
    prefix = [0] * (n_max + 2)  # prefix[n] = A_0 + ... + A_{n-1}
    prefix[1] = 1
    for n in range(1, n_max + 1):
        lo = 0 if beta is None else max(0, n - beta)
        total = prefix[n] - prefix[lo]
        for k in excluded:
            if k > n:
                break
            total -= A[n - k]
        A[n] = total
        prefix[n + 1] = prefix[n] + total
    return A


def count_exact(ps: PartSet, n_max: int) -> ExactCountTable:
    """|Λ_0|, ..., |Λ_{n_max}| as exact integers."""
    return ExactCountTable(ps.to_json(), tuple(_exact_counts(ps, n_max)))


def count_truncated(tps: TruncatedPartSet, n_max: int) -> ExactCountTable:
    """|Λ_n^β| for n = 0..n_max (parts restricted to S ∩ [1, β])."""
    return ExactCountTable(tps.to_json(), tuple(_exact_counts(tps, n_max)))


def scaled_counts(universe: Universe, n_max: int, p: float | None = None) -> ScaledCountTable:
    """Floating table c_n = A_n p^n, built directly from the recurrence.

    The first few entries come from exact counts so that empty Λ_n give an
    exact zero rather than a rounding residue.
    """
    if p is None:
        p = universe_root(universe)
    head = min(n_max, _EXACT_HEAD)
    A = _exact_counts(universe, head)
    c = np.zeros(n_max + 1)
    for n in range(head + 1):
        c[n] = A[n] * p**n
    if isinstance(universe, TruncatedPartSet):
        ks = np.array(universe.parts())
        pk = p ** ks.astype(float)
        for n in range(head + 1, n_max + 1):
            sel = ks <= n
            c[n] = np.dot(c[n - ks[sel]], pk[sel])
        return ScaledCountTable(p, c)
    excluded = universe.excluded
    pex = [p**k for k in excluded]
    # T = sum_{k=1}^{n} c_{n-k} p^k
    T = float(np.dot(c[:head][::-1], p ** np.arange(1, head + 1, dtype=float))) if head else 0.0
    for n in range(head + 1, n_max + 1):
        T = p * (c[n - 1] + T)
        v = T
        for k, pw in zip(excluded, pex):
            if k > n:
                break
            v -= c[n - k] * pw
        c[n] = v
    return ScaledCountTable(p, c)


def count_asymptotic(ps: PartSet, p: float, n: int) -> AsymptoticCount:
    """Leading term 1 / (p^n sum_{k in S} k p^k) of |Λ_n|."""
    from .asymptotics import series_sum

    s01 = series_sum(ps, p, 0, 1)
    log_value = -n * math.log(p) - math.log(s01)
    value = math.exp(log_value) if log_value < 709.0 else None
    return AsymptoticCount(n, log_value, value)


def _power_sums(universe: Universe, n_max: int, t: int) -> list[int]:
    W = [0] * (n_max + 1)
    W[0] = 1
    for n in range(1, n_max + 1):
        if isinstance(universe, TruncatedPartSet):
            ks = universe.base.parts_up_to(min(n, universe.beta))
        else:
            ks = universe.parts_up_to(n)
        W[n] = sum(k**t * W[n - k] for k in ks)
    return W


def power_moment_sum(ps: Universe, n_max: int, t: int) -> list[int]:
    """Exact sums  sum_{λ in Λ_n} B(λ)^t  for n = 0..n_max.

    These are the coefficients of 1 / (1 - sum_{k in S} k^t x^k).
    """
    if t < 0:
        raise ValueError("t must be a nonnegative integer")
    return _power_sums(ps, n_max, t)


def expected_power(ps: Universe, n_max: int, t: int) -> list[Fraction | None]:
    """E_n(B^t) as exact fractions; None where Λ_n is empty."""
    W = power_moment_sum(ps, n_max, t)
    A = _exact_counts(ps, n_max)
    return [Fraction(w, a) if a else None for w, a in zip(W, A)]


@dataclass(frozen=True)
class LogMomentTable:
    """Normalised moments of log B for n = 0..n_max.

    ``shifted[t][n]`` holds E_n(Y^t) with Y = log B - drift * n; raw and
    central moments are derived from it.  Entries are NaN where Λ_n is empty.
    """

    drift: float
    shifted: np.ndarray = field(repr=False)

    @property
    def n_max(self) -> int:
        return self.shifted.shape[1] - 1

    @property
    def t_max(self) -> int:
        return self.shifted.shape[0] - 1

    def present(self, n: int) -> bool:
        return not math.isnan(self.shifted[0, n])

    def raw(self, t: int, n: int | None = None):
        """E_n((log B)^t)."""
        ns = np.arange(self.n_max + 1) if n is None else n
        shift = self.drift * ns
        out = 0.0
        for j in range(t + 1):
            out = out + BINOMIAL[t][j] * shift ** (t - j) * self.shifted[j, ns]
        return out

    def mean(self, n=None):
        ns = slice(None) if n is None else n
        return self.shifted[1, ns] + self.drift * (np.arange(self.n_max + 1)[ns])

    def variance(self, n=None):
        ns = slice(None) if n is None else n
        y1, y2 = self.shifted[1, ns], self.shifted[2, ns]
        # even central moments are nonnegative; clamp rounding residue
        return np.maximum(y2 - y1 * y1, 0.0)

    def fourth_central(self, n=None):
        if self.t_max < 4:
            raise ValueError("fourth central moment needs t_max >= 4")
        ns = slice(None) if n is None else n
        y1, y2, y3, y4 = (self.shifted[t, ns] for t in range(1, 5))
        return np.maximum(y4 - 4 * y3 * y1 + 6 * y2 * y1 * y1 - 3 * y1**4, 0.0)


def _default_drift(universe: Universe, p: float, K: int) -> float:
    if isinstance(universe, TruncatedPartSet):
        ks = np.array(universe.parts(), dtype=float)
    else:
        ks = np.array(universe.parts_up_to(K), dtype=float)
    w = p**ks
    return float(np.dot(np.log(ks), w) / np.dot(ks, w))


def _kernel_cap(universe: Universe, p: float, kernel_tol: float) -> int:
    if isinstance(universe, TruncatedPartSet):
        return universe.beta
    if p >= 1.0:
        raise ValueError("cofinite part set needs p < 1")
    return max(universe.max_excluded + 1, math.ceil(math.log(kernel_tol) / math.log(p)))


def log_moment_table(
    universe: Universe,
    n_max: int,
    t_max: int = 4,
    drift: float | None = None,
    kernel_tol: float = 1e-25,
) -> LogMomentTable:
    """Moments E_n((log B - drift n)^t), t <= t_max, through the first-part recurrence.

    With weights w_{n,k} = A_{n-k}/A_n,

        E_n(Y^t) = sum_k w_{n,k} sum_j C(t,j) g(k)^j E_{n-k}(Y^{t-j}),
        g(k) = log k - drift k.

    The drift only recentres the variable; the default (the mean-line slope)
    keeps the recursion free of large cancellations.  First parts whose
    weight falls below ``kernel_tol`` (relative) are dropped for speed.
    """
    if not 0 <= t_max <= 4:
        raise ValueError("t_max must be between 0 and 4")
    p = universe_root(universe)
    K = _kernel_cap(universe, p, kernel_tol)
    if drift is None:
        drift = _default_drift(universe, p, max(K, 1))
    table = scaled_counts(universe, n_max, p)
    c = table.c
    if isinstance(universe, TruncatedPartSet):
        parts = np.array(universe.parts())
    else:
        parts = np.array(universe.parts_up_to(K))
    pk = p ** parts.astype(float)
    g = np.log(parts.astype(float)) - drift * parts
    gpow = [g**j for j in range(t_max + 1)]

    y = np.full((t_max + 1, n_max + 1), np.nan)
    y[:, 0] = 0.0
    y[0, 0] = 1.0
    for n in range(1, n_max + 1):
        if c[n] == 0.0:
            continue
        m = np.searchsorted(parts, n, side="right")
        ks = parts[:m]
        prev = n - ks
        w = c[prev] * pk[:m]
        ok = w > 0
        if not ok.all():
            ks, prev, w = ks[ok], prev[ok], w[ok]
            gp = [gj[:m][ok] for gj in gpow]
        else:
            gp = [gj[:m] for gj in gpow]
        w = w / w.sum()
        y[0, n] = 1.0
        for t in range(1, t_max + 1):
            acc = 0.0
            for j in range(t + 1):
                acc += BINOMIAL[t][j] * np.dot(w, gp[j] * y[t - j, prev])
            y[t, n] = acc
    return LogMomentTable(drift, y)
