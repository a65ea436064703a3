"""Roots of (1 - x) f(x): the principal root p and the full root profile."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .part_set import PartSet, TruncatedPartSet, denominator_polynomial

__all__ = [
    "Root",
    "RootProfile",
    "RootConvergenceError",
    "RootGapError",
    "principal_root",
    "truncated_principal_root",
    "all_roots",
    "DEFAULT_TOL",
    "GAP_THRESHOLD",
]

DEFAULT_TOL = 1e-12
GAP_THRESHOLD = 1e-9


class RootConvergenceError(RuntimeError):
    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class RootGapError(RuntimeError):
    """The second root magnitude is too close to p for reliable asymptotics."""


@dataclass(frozen=True)
class Root:
    value: complex
    multiplicity: int
    residual: float
    scale: float = 1.0

    @property
    def scaled_residual(self) -> float:
        return self.residual / self.scale

    def to_json(self) -> dict:
        return {
            "re": self.value.real,
            "im": self.value.imag,
            "multiplicity": self.multiplicity,
            "residual": self.residual,
        }


@dataclass(frozen=True)
class RootProfile:
    p: float
    roots: tuple[Root, ...]
    r: float
    degree: int

    def to_json(self) -> dict:
        return {"p": self.p, "r": self.r, "roots": [z.to_json() for z in self.roots]}


def _bisect_newton(g, dg, lo, hi, tol):
    """Sign-bracketed root of g on [lo, hi] with g(lo) > 0 > g(hi)."""
    while hi - lo > max(tol, 4 * math.ulp(hi)):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    # Newton polish, kept inside the bracket
    for _ in range(5):
        d = dg(x)
        if d == 0:
            break
        x_new = x - g(x) / d
        if not (lo - tol <= x_new <= hi + tol) or x_new == x:
            break
        x = x_new
    return x


def principal_root(ps: PartSet, tol: float = DEFAULT_TOL) -> float:
    """The unique root of f in (1/2, 1).

    Bisection on the integer polynomial (1 - x) f(x), which is positive at 1/2
    and equals -1 at x = 1, then a few bracketed Newton steps.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    poly = denominator_polynomial(ps)
    return _bisect_newton(poly, poly.derivative, 0.5, 1.0, tol)


def truncated_principal_root(tps: TruncatedPartSet, tol: float = DEFAULT_TOL) -> float:
    """Positive root of 1 - sum_{k in S, k <= beta} x^k in (0, 1]."""
    ks = tps.parts()
    if len(ks) == 1:
        return 1.0

    def g(x):
        return 1.0 - math.fsum(x**k for k in ks)

    def dg(x):
        return -math.fsum(k * x ** (k - 1) for k in ks)

    return _bisect_newton(g, dg, 0.0, 1.0, tol)


def _newton_complex(coeffs_desc, z, steps=3):
    for _ in range(steps):
        val = np.polyval(coeffs_desc, z)
        der = np.polyval(np.polyder(coeffs_desc), z)
        if der == 0:
            break
        z = z - val / der
    return z


def _residual_scale(coeffs_asc, z):
    return sum(abs(c) * abs(z) ** j for j, c in enumerate(coeffs_asc))


def all_roots(ps: PartSet, tol: float = DEFAULT_TOL, gap_threshold: float = GAP_THRESHOLD) -> RootProfile:
    """All M + 1 roots of (1 - x) f(x), sorted by magnitude then phase.

    p is found first by :func:`principal_root` and deflated out; the remaining
    roots come from companion-matrix eigenvalues of the quotient and are then
    Newton-polished against the undeflated polynomial.
    """
    poly = denominator_polynomial(ps)
    coeffs = poly.coefficients
    deg = poly.degree
    p = principal_root(ps, tol)

    desc = np.array(coeffs[::-1], dtype=float)
    # synthetic division by (x - p)
    quot = np.zeros(deg)
    acc = 0.0
    for i in range(deg):
        acc = acc * p + desc[i]
        quot[i] = acc
    if deg > 1:
        others = np.roots(quot).astype(complex)
    else:
        others = np.array([], dtype=complex)

    values = [complex(p)] + [complex(_newton_complex(desc, z)) for z in others]
    # snap essentially-real roots onto the real axis
    values = [complex(z.real, 0.0) if abs(z.imag) <= 1e3 * tol * max(1.0, abs(z)) else z for z in values]

    residuals = [abs(poly(z)) for z in values]
    scales = [_residual_scale(coeffs, z) for z in values]
    worst = max(res / sc for res, sc in zip(residuals, scales))
    if not math.isfinite(worst) or worst > 1e3 * tol:
        raise RootConvergenceError(
            f"root polishing did not converge (worst scaled residual {worst:.3e})", residuals
        )

    clustered = _cluster(values, residuals, scales, tol)
    clustered.sort(key=lambda rt: (round(abs(rt.value), 10), cmath.phase(rt.value)))
    # p must head the list
    if not abs(clustered[0].value - p) <= 10 * tol:
        head = min(clustered, key=lambda rt: abs(rt.value - p))
        clustered.remove(head)
        clustered.insert(0, head)
    if len(clustered) > 1:
        r = abs(clustered[1].value)
        if r - p <= gap_threshold:
            raise RootGapError(f"root gap r - p = {r - p:.3e} is below {gap_threshold:.1e}")
    else:
        r = math.inf
    if clustered[0].multiplicity != 1:
        raise RootConvergenceError("principal root reported with multiplicity > 1")
    return RootProfile(p=p, roots=tuple(clustered), r=r, degree=deg)


def _cluster(values, residuals, scales, tol):
    """Merge numerically coincident roots into one entry with a multiplicity."""
    radius = max(1e-6, math.sqrt(tol))
    out: list[Root] = []
    used = [False] * len(values)
    for i, z in enumerate(values):
        if used[i]:
            continue
        group = [i]
        used[i] = True
        for j in range(i + 1, len(values)):
            if not used[j] and abs(values[j] - z) <= radius * max(1.0, abs(z)):
                group.append(j)
                used[j] = True
        centre = sum(values[g] for g in group) / len(group)
        if abs(centre.imag) <= radius:
            centre = complex(centre.real, 0.0)
        worst = max(group, key=lambda g: residuals[g] / scales[g])
        out.append(Root(centre, len(group), residuals[worst], scales[worst]))
    return out
