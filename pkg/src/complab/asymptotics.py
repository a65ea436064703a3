"""Series sums over S at p and the closed-form asymptotic constants.

With s(i, j) = sum_{k in S} k^j (log k)^i p^k,

    mean:      E_n(log B) = a1 n + a0 + (exponentially small)
    variance:  V_n(log B) = b1 n + b0 + (exponentially small)
    count:     |Λ_n| ~ 1 / (p^n s(0, 1))
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .part_set import PartSet
from .roots import principal_root

__all__ = [
    "SeriesSums",
    "AsymptoticConstants",
    "SeriesTolError",
    "series_sum",
    "series_sums",
    "mean_constants",
    "variance_constants",
    "variance_intercept_lines",
    "asymptotic_constants",
    "DEFAULT_SERIES_TOL",
]

DEFAULT_SERIES_TOL = 1e-14
TERM_CAP = 1_000_000

# the (i, j) index pairs the mean and variance constants consume
NEEDED = ((0, 0), (0, 1), (0, 2), (0, 3), (1, 0), (1, 1), (1, 2), (2, 0), (2, 1))


class SeriesTolError(RuntimeError):
    def __init__(self, message, achieved):
        super().__init__(message)
        self.achieved = achieved


def _full_power_sum(p: float, j: int) -> float:
    """sum_{k >= 1} k^j p^k in closed form."""
    q = 1.0 - p
    if j == 0:
        return p / q
    if j == 1:
        return p / q**2
    if j == 2:
        return p * (1 + p) / q**3
    if j == 3:
        return p * (1 + 4 * p + p * p) / q**4
    raise ValueError("closed forms exist here only for j <= 3")


def _tail_start(p: float, i: int, j: int) -> tuple[int, float]:
    """K0 and rho with a_{k+1}/a_k <= rho < 1 for all k >= K0."""
    rho = 0.5 * (1.0 + p)
    k = 2
    while True:
        ratio = p * ((k + 1) / k) ** j * (math.log(k + 1) / math.log(k)) ** i
        if ratio <= rho:
            return k, rho
        k += 1


def series_sum(ps: PartSet, p: float, i: int, j: int, tol: float = DEFAULT_SERIES_TOL) -> float:
    """sum_{k in S} k^j (log k)^i p^k with absolute error at most ``tol``.

    For i = 0 the full geometric-type sums are used, minus the excluded terms.
    For i >= 1 terms are summed until the geometric tail bound
    a_K rho / (1 - rho) certifies the remainder is below ``tol``.
    """
    if not (0 <= i <= 2 and 0 <= j <= 3):
        raise ValueError("need 0 <= i <= 2 and 0 <= j <= 3")
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    return _series_sum_with_bound(ps, p, i, j, tol)[0]


def _series_sum_with_bound(ps, p, i, j, tol):
    if i == 0:
        total = _full_power_sum(p, j) - math.fsum(k**j * p**k for k in ps.excluded)
        return total, 0.0
    K0, rho = _tail_start(p, i, j)
    K0 = max(K0, ps.max_excluded + 1)
    terms = []
    k = 1
    bound = math.inf
    while k <= TERM_CAP:
        a = k**j * math.log(k) ** i * p**k
        if k in ps:
            terms.append(a)
        if k >= K0:
            bound = a * rho / (1.0 - rho)
            if bound < tol:
                return math.fsum(terms), bound
        k += 1
    raise SeriesTolError(f"tail bound {bound:.3e} above tol {tol:.1e} after {TERM_CAP} terms", bound)


@dataclass(frozen=True)
class SeriesSums:
    p: float
    s: dict = field(repr=False)  # (i, j) -> value
    tol: float = DEFAULT_SERIES_TOL

    def __getitem__(self, key):
        return self.s[key]

    def to_json(self) -> dict:
        return {f"s{i}{j}": v for (i, j), v in sorted(self.s.items())}


def series_sums(ps: PartSet, p: float | None = None, tol: float = DEFAULT_SERIES_TOL) -> SeriesSums:
    if p is None:
        p = principal_root(ps)
    achieved = 0.0
    s = {}
    for i, j in NEEDED:
        s[(i, j)], b = _series_sum_with_bound(ps, p, i, j, tol)
        achieved = max(achieved, b)
    return SeriesSums(p, s, max(achieved, tol))


def mean_constants(ps: PartSet, sums: SeriesSums) -> tuple[float, float]:
    """(a1, a0) for E_n(log B) = a1 n + a0 + o(1)."""
    L1, K1, K2, KL = sums[1, 0], sums[0, 1], sums[0, 2], sums[1, 1]
    a1 = L1 / K1
    a0 = L1 * K2 / K1**2 - KL / K1
    return a1, a0


def variance_intercept_lines(sums: SeriesSums) -> tuple[float, float, float]:
    """The three lines of b0, returned separately so each can be inspected.

    line 1: 2 L1^2 K2^2 / K1^4 - (L1^2 K3 + 4 L1 KL K2) / K1^3
    line 2: (KL^2 + L2 K2 + 2 L1 K2L) / K1^2
    line 3: - KL2 / K1

    L_i = sum (log k)^i p^k, K_j = sum k^j p^k, KL = sum k log k p^k,
    K2L = sum k^2 log k p^k, KL2 = sum k (log k)^2 p^k.
    """
    K1, K2, K3 = sums[0, 1], sums[0, 2], sums[0, 3]
    L1, L2 = sums[1, 0], sums[2, 0]
    KL, K2L, KL2 = sums[1, 1], sums[1, 2], sums[2, 1]
    line1 = 2 * L1**2 * K2**2 / K1**4 - (L1**2 * K3 + 4 * L1 * KL * K2) / K1**3
    line2 = (KL**2 + L2 * K2 + 2 * L1 * K2L) / K1**2
    line3 = -KL2 / K1
    return line1, line2, line3


def variance_constants(ps: PartSet, sums: SeriesSums) -> tuple[float, float]:
    """(b1, b0) for V_n(log B) = b1 n + b0 + o(1)."""
    K1, K2 = sums[0, 1], sums[0, 2]
    L1, L2, KL = sums[1, 0], sums[2, 0], sums[1, 1]
    b1 = L1**2 * K2 / K1**3 - 2 * L1 * KL / K1**2 + L2 / K1
    b0 = math.fsum(variance_intercept_lines(sums))
    return b1, b0


@dataclass(frozen=True)
class AsymptoticConstants:
    p: float
    a1: float
    a0: float
    b1: float
    b0: float
    count_prefactor: float
    sums: SeriesSums = field(repr=False)

    def mu(self, n):
        return self.a1 * n + self.a0

    def sigma2(self, n):
        return self.b1 * n + self.b0

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "a1": self.a1,
            "a0": self.a0,
            "b1": self.b1,
            "b0": self.b0,
            "prefactor": self.count_prefactor,
            "series_sums": self.sums.to_json(),
        }


def asymptotic_constants(ps: PartSet, p: float | None = None, tol: float = DEFAULT_SERIES_TOL) -> AsymptoticConstants:
    sums = series_sums(ps, p, tol)
    a1, a0 = mean_constants(ps, sums)
    b1, b0 = variance_constants(ps, sums)
    if not (a1 > 0 and b1 > 0):
        raise ArithmeticError(f"expected a1 > 0 and b1 > 0, got a1={a1}, b1={b1}")
    return AsymptoticConstants(sums.p, a1, a0, b1, b0, 1.0 / sums[0, 1], sums)
