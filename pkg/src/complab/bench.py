"""Statistical checks of asymptotic lognormality of the part product.

Exact small-n distributions, Monte Carlo Kolmogorov-Smirnov distances against
the standard normal, the large-part tail probability, fourth-moment growth and
the blocking moment aggregation.
"""
from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import ndtr

from .asymptotics import asymptotic_constants
from .blocking import DEFAULT_BETA_MULTIPLIER, DEFAULT_ENUMERATION_CAP, block_log_sums, default_parameters
from .counting import _exact_counts, log_moment_table
from .part_set import PartSet, TruncatedPartSet
from .sampler import RNG_NAME, CompositionSampler, make_generator, sample_log_products

__all__ = [
    "ExactDistribution",
    "BenchReport",
    "exact_distribution",
    "exact_ks_distance",
    "ks_distance",
    "ks_standardized",
    "tail_probability",
    "fourth_moment_check",
    "blocking_moment_check",
]


@dataclass(frozen=True)
class ExactDistribution:
    """Law of log B under the uniform measure on Λ_n.

    ``products`` are the distinct values of B in increasing order and
    ``probabilities`` their exact masses.
    """

    n: int
    products: tuple[int, ...]
    probabilities: tuple[Fraction, ...]

    @property
    def support(self) -> list[tuple[float, Fraction]]:
        return [(math.log(b), q) for b, q in zip(self.products, self.probabilities)]

    def cdf_values(self) -> np.ndarray:
        return np.cumsum([float(q) for q in self.probabilities])


def exact_distribution(ps: PartSet, n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> ExactDistribution:
    """Exact law of B on Λ_n, grouped by the integer value of the product.

    Rather than listing Λ_n one composition at a time, the multiset of
    products is built by the first-part recursion on product tallies, which
    produces the same grouped counts.
    """
    A = _exact_counts(ps, n)
    if A[n] == 0:
        raise ValueError(f"n={n} is not representable")
    if A[n] > cap:
        raise ValueError(f"|Λ_n| = {A[n]} exceeds the enumeration cap {cap}")
    tallies: list[Counter] = [Counter({1: 1})]
    for r in range(1, n + 1):
        t: Counter = Counter()
        for k in ps.parts_up_to(r):
            for b, cnt in tallies[r - k].items():
                t[b * k] += cnt
        tallies.append(t)
    final = tallies[n]
    total = sum(final.values())
    assert total == A[n]
    products = tuple(sorted(final))
    probs = tuple(Fraction(final[b], total) for b in products)
    return ExactDistribution(n, products, probs)


def exact_ks_distance(dist: ExactDistribution, mu: float, sigma: float) -> float:
    """sup_x |P_n((log B - mu)/sigma <= x) - Φ(x)| for an exact law."""
    z = (np.log(np.array(dist.products, dtype=float)) - mu) / sigma
    F = dist.cdf_values()
    F_before = np.concatenate(([0.0], F[:-1]))
    Phi = ndtr(z)
    return float(max(np.max(np.abs(F - Phi)), np.max(np.abs(Phi - F_before))))


def ks_distance(z: np.ndarray) -> float:
    """One-sample KS statistic of a sample against the standard normal."""
    z = np.sort(np.asarray(z, dtype=float))
    N = len(z)
    Phi = ndtr(z)
    i = np.arange(1, N + 1)
    return float(max(np.max(i / N - Phi), np.max(Phi - (i - 1) / N)))


@dataclass
class BenchReport:
    n: int
    samples: int
    seed: int
    rng: str
    mu_used: float
    sigma_used: float
    ks_distance: float
    empirical_mean: float
    empirical_variance: float
    max_part: int
    moments: str = "asymptotic"
    runtime: float = field(default=0.0, compare=False)

    def to_json(self, timestamps: bool = True) -> dict:
        out = {
            "n": self.n,
            "samples": self.samples,
            "seed": self.seed,
            "rng": self.rng,
            "moments": self.moments,
            "mu_used": self.mu_used,
            "sigma_used": self.sigma_used,
            "ks_distance": self.ks_distance,
            "empirical_mean": self.empirical_mean,
            "empirical_variance": self.empirical_variance,
            "max_part": self.max_part,
        }
        if timestamps:
            out["runtime"] = self.runtime
        return out


def ks_standardized(
    ps: PartSet,
    n: int,
    samples: int,
    seed: int,
    threads: int = 1,
    exact_moments: bool = False,
) -> BenchReport:
    """KS distance between standardised log B (N uniform samples) and Φ.

    μ_n and σ_n come from the asymptotic lines a1 n + a0 and b1 n + b0 unless
    ``exact_moments`` is set, in which case the recurrence moments are used.
    """
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    t0 = time.perf_counter()
    if exact_moments:
        table = log_moment_table(ps, n, t_max=2)
        mu, var = float(table.mean(n)), float(table.variance(n))
    else:
        const = asymptotic_constants(ps)
        mu, var = const.mu(n), const.sigma2(n)
    if not var > 0:
        raise ValueError(f"variance line is not positive at n={n}")
    sigma = math.sqrt(var)
    logs, max_part = sample_log_products(ps, n, samples, seed, threads, with_max=True)
    ks = ks_distance((logs - mu) / sigma)
    return BenchReport(
        n=n,
        samples=samples,
        seed=seed,
        rng=RNG_NAME,
        mu_used=mu,
        sigma_used=sigma,
        ks_distance=ks,
        empirical_mean=float(logs.mean()),
        empirical_variance=float(logs.var(ddof=1)),
        max_part=max_part,
        moments="exact" if exact_moments else "asymptotic",
        runtime=time.perf_counter() - t0,
    )


def tail_probability(ps: PartSet, n: int, beta: int) -> Fraction:
    """P_n(some part exceeds β) = 1 - |Λ_n^β| / |Λ_n|, exactly."""
    A = _exact_counts(ps, n)[n]
    if A == 0:
        raise ValueError(f"n={n} is not representable")
    if beta >= n:
        return Fraction(0)
    Ab = _exact_counts(TruncatedPartSet(ps, beta), n)[n]
    return 1 - Fraction(Ab, A)


def fourth_moment_check(ps: PartSet, n_list) -> dict:
    """R_n / n^2 for each n, from the log-moment recurrence."""
    n_list = sorted(int(n) for n in n_list)
    table = log_moment_table(ps, max(n_list), t_max=4)
    rows = []
    for n in n_list:
        R = float(table.fourth_central(n))
        rows.append({"n": n, "fourth_central": R, "variance": float(table.variance(n)), "ratio": R / n**2})
    ratios = [r["ratio"] for r in rows]
    finite = all(math.isfinite(x) for x in ratios)
    spread = max(ratios) / min(ratios) if finite and min(ratios) > 0 else math.inf
    return {"rows": rows, "finite": finite, "max_over_min": spread}


def blocking_moment_check(
    ps: PartSet,
    n: int,
    samples: int,
    seed: int,
    C: float = 2.0,
    multiplier: float = DEFAULT_BETA_MULTIPLIER,
) -> dict:
    """Monte Carlo check that the block log products add up to E_n(log B).

    Samples Λ_n^β uniformly with the default (m, β), averages
    L_1 + ... + L_m and compares with E_n(log B) against C m β; also checks
    L_0 <= m log β and L_{m+1} <= m log β on every draw, and the block-sum
    window n/m - 2β <= π_i <= n/m.
    """
    p = asymptotic_constants(ps).p
    params = default_parameters(n, p, multiplier)
    if not params.valid:
        raise ValueError(f"default parameters (m={params.m}, beta={params.beta}) are not valid at n={n}")
    m, beta = params.m, params.beta
    tps = TruncatedPartSet(ps, beta)
    sampler = CompositionSampler(tps, n)
    gen = make_generator(seed, 0)
    inner = np.empty(samples)
    cap = m * math.log(beta)
    l0_ok = lm1_ok = window_ok = True
    max_l0 = max_lm1 = 0.0
    for i, parts in enumerate(sampler.iter_parts(samples, gen)):
        L, sums = block_log_sums(parts, m)
        inner[i] = L[1 : m + 1].sum()
        max_l0 = max(max_l0, float(L[0]))
        max_lm1 = max(max_lm1, float(L[m + 1]))
        if L[0] > cap + 1e-9:
            l0_ok = False
        if L[m + 1] > cap + 1e-9:
            lm1_ok = False
        s = sums[:m]
        if s.min() < n / m - 2 * beta or s.max() > n / m:
            window_ok = False
    mean_log_b = float(log_moment_table(ps, n, t_max=1).mean(n))
    avg = float(inner.mean())
    deviation = abs(avg - mean_log_b)
    return {
        "n": n,
        "samples": samples,
        "seed": seed,
        "rng": RNG_NAME,
        "m": m,
        "beta": beta,
        "mean_inner_blocks": avg,
        "mean_log_b": mean_log_b,
        "deviation": deviation,
        "deviation_over_m_beta": deviation / (m * beta),
        "bound": C * m * beta,
        "deviation_ok": deviation <= C * m * beta,
        "max_L0": max_l0,
        "max_Lm1": max_lm1,
        "m_log_beta": cap,
        "L0_ok": l0_ok,
        "Lm1_ok": lm1_ok,
        "window_ok": window_ok,
        "passed": deviation <= C * m * beta and l0_ok and lm1_ok and window_ok,
    }
