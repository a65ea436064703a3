import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import kstest, norm

from complab.asymptotics import asymptotic_constants
from complab.bench import (
    blocking_moment_check,
    exact_distribution,
    exact_ks_distance,
    fourth_moment_check,
    ks_distance,
    ks_standardized,
    tail_probability,
)
from complab.blocking import default_beta
from complab.part_set import make_part_set
from complab.roots import principal_root

from conftest import brute_force

ONE_FREE = make_part_set([1])


def test_exact_distribution_small():
    d = exact_distribution(ONE_FREE, 5)
    assert d.products == (5, 6)
    assert d.probabilities == (Fraction(1, 3), Fraction(2, 3))
    assert exact_distribution(ONE_FREE, 2).probabilities == (Fraction(1),)


def test_exact_distribution_matches_enumeration(part_set):
    n = 15
    d = exact_distribution(part_set, n)
    comps = brute_force(part_set, n)
    counts = {}
    for c in comps:
        counts[math.prod(c)] = counts.get(math.prod(c), 0) + 1
    assert d.products == tuple(sorted(counts))
    assert d.probabilities == tuple(Fraction(counts[b], len(comps)) for b in d.products)
    assert sum(d.probabilities) == 1


def test_exact_distribution_cap():
    with pytest.raises(ValueError, match="cap"):
        exact_distribution(ONE_FREE, 40, cap=1000)


def test_exact_ks_decreases():
    c = asymptotic_constants(ONE_FREE)
    ks = [exact_ks_distance(exact_distribution(ONE_FREE, n), c.mu(n), math.sqrt(c.sigma2(n))) for n in (10, 25)]
    assert 0 < ks[1] < ks[0] < 1


def test_ks_distance_matches_scipy():
    z = np.random.default_rng(0).normal(size=5000)
    assert ks_distance(z) == pytest.approx(kstest(z, norm.cdf).statistic, abs=1e-14)


def test_ks_standardized_report():
    rep = ks_standardized(ONE_FREE, 300, 20_000, seed=5)
    assert 0 <= rep.ks_distance <= 1 and rep.sigma_used > 0
    assert abs(rep.empirical_mean - rep.mu_used) < 5 * rep.sigma_used / math.sqrt(rep.samples)
    again = ks_standardized(ONE_FREE, 300, 20_000, seed=5, threads=3)
    assert again.to_json(timestamps=False) == rep.to_json(timestamps=False)
    assert "runtime" not in rep.to_json(timestamps=False)
    exact = ks_standardized(ONE_FREE, 300, 20_000, seed=5, exact_moments=True)
    assert exact.moments == "exact" and exact.mu_used == pytest.approx(rep.mu_used, abs=1e-9)


def test_ks_requires_samples():
    with pytest.raises(ValueError):
        ks_standardized(ONE_FREE, 100, 10, seed=0)


def test_tail_probability():
    assert tail_probability(ONE_FREE, 30, 30) == 0
    vals = [tail_probability(ONE_FREE, 60, b) for b in range(2, 62, 4)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    p = principal_root(ONE_FREE)
    b = default_beta(100, p)
    assert tail_probability(ONE_FREE, 100, b) <= 10 * 100 * p**b


def test_tail_probability_against_enumeration():
    comps = brute_force(ONE_FREE, 16)
    assert tail_probability(ONE_FREE, 16, 5) == Fraction(sum(max(c) > 5 for c in comps), len(comps))


def test_fourth_moment_ratios():
    rep = fourth_moment_check(ONE_FREE, [100, 200, 400])
    assert rep["finite"] and rep["max_over_min"] < 3
    assert all(r["fourth_central"] >= 0 for r in rep["rows"])
    single = fourth_moment_check(make_part_set([1, 2]), [3])  # only (3)
    assert single["rows"][0]["fourth_central"] == 0


def test_blocking_moment_check_small():
    rep = blocking_moment_check(ONE_FREE, 20_000, 200, seed=1)
    assert rep["passed"]
    assert rep["max_L0"] <= rep["m_log_beta"]
