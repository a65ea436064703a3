"""The acceptance suite as plain check functions.

Each check returns a :class:`CheckResult`; ``quick=True`` shrinks the Monte
Carlo and enumeration sizes so the whole suite runs in seconds (the full
sizes are what the acceptance tests use).
"""
from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.stats import chisquare

from .asymptotics import asymptotic_constants
from .bench import (
    blocking_moment_check,
    exact_distribution,
    exact_ks_distance,
    fourth_moment_check,
    ks_standardized,
    tail_probability,
)
from .blocking import conditional_independence_check, decompose, default_beta, reconstruct
from .counting import count_asymptotic, count_exact, log_moment_table, power_moment_sum
from .enumeration import enumerate_all_compositions, enumerate_compositions
from .part_set import TruncatedPartSet, make_part_set
from .roots import all_roots
from .sampler import CompositionSampler, make_generator

__all__ = ["CheckResult", "CHECKS", "run_checks", "TEST_PART_SETS"]

TEST_PART_SETS = ((1,), (2,), (1, 2), (1, 4), (3,))
WORKED_EXAMPLE = (3, 2, 3, 1, 2, 2, 2, 3, 2, 2, 2, 1)


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: dict
    runtime: float = field(default=0.0, compare=False)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.name}: {_summary(self.detail)}"

    def to_json(self, timestamps: bool = True) -> dict:
        out = {"number": self.number, "name": self.name, "passed": self.passed, "detail": self.detail}
        if timestamps:
            out["runtime"] = self.runtime
        return out


def _summary(detail: dict) -> str:
    keys = [k for k, v in detail.items() if isinstance(v, (int, float, bool, str))]
    return ", ".join(f"{k}={_fmt(detail[k])}" for k in keys[:6])


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.4g}"
    return str(v)


def _sets():
    return [make_part_set(ex) for ex in TEST_PART_SETS]


def check_exact_counts(quick: bool = False) -> dict:
    n_max = 14 if quick else 18
    sets = _sets()
    mismatches = []
    tables = {ps: count_exact(ps, n_max) for ps in sets}
    for n in range(n_max + 1):
        tally = Counter()
        for comp in enumerate_all_compositions(n):
            for ps in sets:
                if all(k in ps for k in comp):
                    tally[ps] += 1
        for ps in sets:
            if tally[ps] != tables[ps][n]:
                mismatches.append({"excluded": list(ps.excluded), "n": n})
    return {"passed": not mismatches, "n_max": n_max, "part_sets": len(sets), "mismatches": mismatches}


def check_count_asymptotic(quick: bool = False) -> dict:
    rows = []
    for ex, n, tol in (((1,), 50, 1e-8), ((2,), 40, 1e-6)):
        ps = make_part_set(ex)
        c = asymptotic_constants(ps)
        est = count_asymptotic(ps, c.p, n)
        exact = count_exact(ps, n)[n]
        gap = abs(est.value / exact - 1.0)
        rows.append({"excluded": list(ex), "n": n, "relative_gap": gap, "tol": tol, "ok": gap < tol})
    return {
        "passed": all(r["ok"] for r in rows),
        "gap_excl1_n50": rows[0]["relative_gap"],
        "gap_excl2_n40": rows[1]["relative_gap"],
        "rows": rows,
    }


def check_power_moments(quick: bool = False) -> dict:
    n_max = 12 if quick else 15
    bad = []
    for ps in _sets()[:3]:
        W1 = power_moment_sum(ps, n_max, 1)
        W2 = power_moment_sum(ps, n_max, 2)
        for n in range(n_max + 1):
            prods = [math.prod(c) for c in enumerate_all_compositions(n) if all(k in ps for k in c)]
            if not prods:
                if W1[n] or W2[n]:
                    bad.append({"excluded": list(ps.excluded), "n": n})
                continue
            e1, e2 = Fraction(sum(prods), len(prods)), Fraction(sum(b * b for b in prods), len(prods))
            A = len(prods)
            if Fraction(W1[n], A) != e1 or Fraction(W2[n], A) != e2:
                bad.append({"excluded": list(ps.excluded), "n": n})
    return {"passed": not bad, "n_max": n_max, "part_sets": 3, "mismatches": bad}


def _line_errors(n: int) -> list[dict]:
    rows = []
    for ex in ((1,), (2,)):
        ps = make_part_set(ex)
        c = asymptotic_constants(ps)
        t = log_moment_table(ps, n, t_max=2)
        rows.append(
            {
                "excluded": list(ex),
                "mean_error": abs(float(t.mean(n)) - c.mu(n)),
                "variance_error": abs(float(t.variance(n)) - c.sigma2(n)),
            }
        )
    return rows


def check_mean_line(quick: bool = False) -> dict:
    rows = _line_errors(200)
    worst = max(r["mean_error"] for r in rows)
    return {"passed": worst < 1e-6, "n": 200, "max_error": worst, "tol": 1e-6, "rows": rows}


def check_variance_line(quick: bool = False) -> dict:
    rows = _line_errors(200)
    worst = max(r["variance_error"] for r in rows)
    return {"passed": worst < 1e-4, "n": 200, "max_error": worst, "tol": 1e-4, "rows": rows}


def check_fourth_moment(quick: bool = False) -> dict:
    rep = fourth_moment_check(make_part_set([1]), [100, 200, 400])
    return {
        "passed": rep["finite"] and rep["max_over_min"] < 3,
        "max_over_min": rep["max_over_min"],
        "ratios": [r["ratio"] for r in rep["rows"]],
    }


def check_roots(quick: bool = False) -> dict:
    rows = []
    for ps in _sets():
        prof = all_roots(ps)
        worst = max(z.scaled_residual for z in prof.roots)
        gap = prof.r - prof.p
        nonreal = sorted(
            (round(z.value.real, 9), round(abs(z.value.imag), 9), z.value.imag > 0)
            for z in prof.roots
            if abs(z.value.imag) > 1e-12
        )
        pairs = Counter((re, im) for re, im, _ in nonreal)
        upper = Counter((re, im) for re, im, up in nonreal if up)
        conj_ok = all(cnt == 2 * upper[key] for key, cnt in pairs.items())
        mult_ok = sum(z.multiplicity for z in prof.roots) == ps.max_excluded + 1
        smallest = abs(prof.roots[0].value - prof.p) < 1e-12 and all(abs(z.value) > prof.p for z in prof.roots[1:])
        rows.append(
            {
                "excluded": list(ps.excluded),
                "p": prof.p,
                "r": prof.r,
                "max_scaled_residual": worst,
                "gap": gap,
                "ok": worst < 1e-10 and gap > 1e-9 and conj_ok and mult_ok and smallest,
            }
        )
    return {
        "passed": all(r["ok"] for r in rows),
        "max_scaled_residual": max(r["max_scaled_residual"] for r in rows),
        "min_gap": min(r["gap"] for r in rows),
        "rows": rows,
    }


def check_sampler_uniformity(quick: bool = False, seed: int = 20240612) -> dict:
    N = 20_000 if quick else 200_000
    ps = make_part_set([1])
    support = list(enumerate_compositions(ps, 12))
    index = {c: i for i, c in enumerate(support)}
    counts = np.zeros(len(support), dtype=np.int64)
    sampler = CompositionSampler(ps, 12)
    invalid = 0
    for parts in sampler.iter_parts(N, make_generator(seed)):
        key = tuple(int(k) for k in parts)
        if key not in index:
            invalid += 1
            continue
        counts[index[key]] += 1
    stat, pvalue = chisquare(counts)
    return {
        "passed": invalid == 0 and pvalue > 1e-3,
        "samples": N,
        "support": len(support),
        "chi2": float(stat),
        "p_value": float(pvalue),
        "invalid": invalid,
    }


def check_worked_example(quick: bool = False) -> dict:
    bd = decompose(WORKED_EXAMPLE, 4, 3, strict=False)
    expected = {
        "tau": (3, 6, 8, 11),
        "pi0": (3, 2, 3, 2),
        "blocks": ((3, 2), (1, 2), (2,), (2, 2), (1,)),
    }
    ok = bd.tau == expected["tau"] and bd.pi0 == expected["pi0"] and bd.blocks == expected["blocks"]
    rt = reconstruct(bd) == WORKED_EXAMPLE
    return {"passed": ok and rt, "decomposition_ok": ok, "roundtrip_ok": rt, "decomposition": bd.to_json()}


def check_independence(quick: bool = False) -> dict:
    n = 18 if quick else 30
    tps = TruncatedPartSet(make_part_set([2]), 3)
    rep = conditional_independence_check(tps, n, 2)
    out = rep.to_json()
    out["passed"] = rep.passed
    return out


def check_tail(quick: bool = False) -> dict:
    ps = make_part_set([1])
    p = asymptotic_constants(ps).p
    rows = []
    for n in (50, 100, 200):
        beta = default_beta(n, p)
        prob = float(tail_probability(ps, n, beta))
        bound = 10 * n * p**beta
        rows.append({"n": n, "beta": beta, "probability": prob, "bound": bound, "ok": prob <= bound})
    return {"passed": all(r["ok"] for r in rows), "max_prob_over_bound": max(r["probability"] / r["bound"] for r in rows), "rows": rows}


def check_clt(quick: bool = False, seed: int = 12345) -> dict:
    ps = make_part_set([1])
    N = 10_000 if quick else 100_000
    small, large = 100, (500 if quick else 2000)
    ks_small = ks_standardized(ps, small, N, seed).ks_distance
    ks_large = ks_standardized(ps, large, N, seed).ks_distance
    c = asymptotic_constants(ps)
    exact = {}
    for n in (10, 25):
        exact[n] = exact_ks_distance(exact_distribution(ps, n), c.mu(n), math.sqrt(c.sigma2(n)))
    ratio = ks_large / ks_small
    return {
        "passed": ks_large < 0.05 and ratio < 0.8 and exact[25] < exact[10],
        "samples": N,
        "ks_small_n": ks_small,
        "ks_large_n": ks_large,
        "ratio": ratio,
        "exact_ks_n10": exact[10],
        "exact_ks_n25": exact[25],
        "n_small": small,
        "n_large": large,
    }


def check_blocking_moments(quick: bool = False, seed: int = 7) -> dict:
    n, N = (10_000, 500) if quick else (100_000, 10_000)
    rep = blocking_moment_check(make_part_set([1]), n, N, seed)
    lead = ("passed", "n", "m", "beta", "deviation", "bound", "max_L0", "m_log_beta")
    return {k: rep[k] for k in lead} | {k: v for k, v in rep.items() if k not in lead}


CHECKS: list[tuple[int, str, Callable[..., dict]]] = [
    (1, "exact counts vs enumeration", check_exact_counts),
    (2, "asymptotic count", check_count_asymptotic),
    (3, "power moments vs enumeration", check_power_moments),
    (4, "mean line", check_mean_line),
    (5, "variance line", check_variance_line),
    (6, "fourth central moment growth", check_fourth_moment),
    (7, "root structure", check_roots),
    (8, "sampler uniformity", check_sampler_uniformity),
    (9, "worked decomposition example", check_worked_example),
    (10, "class sizes and conditional independence", check_independence),
    (11, "large-part tail", check_tail),
    (12, "lognormal convergence", check_clt),
    (13, "block moment aggregation", check_blocking_moments),
]


def run_check(number: int, quick: bool = False) -> CheckResult:
    for num, name, fn in CHECKS:
        if num == number:
            t0 = time.perf_counter()
            detail = fn(quick=quick)
            passed = bool(detail.pop("passed"))
            return CheckResult(num, name, passed, detail, time.perf_counter() - t0)
    raise KeyError(number)


def run_checks(quick: bool = False, only=None) -> list[CheckResult]:
    return [run_check(num, quick) for num, _, _ in CHECKS if only is None or num in only]
