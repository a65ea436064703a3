import math

import pytest

from complab.asymptotics import (
    SeriesTolError,
    asymptotic_constants,
    series_sum,
    series_sums,
    variance_intercept_lines,
)
from complab.counting import log_moment_table
from complab.part_set import make_part_set
from complab.roots import principal_root


def _direct(ps, p, i, j, kmax=2000):
    return math.fsum(k**j * math.log(k) ** i * p**k for k in range(1, kmax) if k in ps)


def test_unit_mass(part_set):
    p = principal_root(part_set)
    assert series_sum(part_set, p, 0, 0) == pytest.approx(1.0, abs=1e-12)


def test_one_free_first_moment():
    ps = make_part_set([1])
    p = principal_root(ps)
    s = series_sum(ps, p, 0, 1)
    assert s == pytest.approx(p / (1 - p) ** 2 - p, abs=1e-14)
    assert s == pytest.approx(3.6180, abs=1e-4)
    assert s == pytest.approx(_direct(ps, p, 0, 1, 200), abs=1e-12)


@pytest.mark.parametrize("i,j", [(1, 0), (1, 1), (1, 2), (2, 0), (2, 1), (0, 3)])
def test_sums_against_direct_summation(part_set, i, j):
    p = principal_root(part_set)
    assert series_sum(part_set, p, i, j) == pytest.approx(_direct(part_set, p, i, j), abs=1e-12)


def test_ordering_and_positivity(part_set):
    s = series_sums(part_set)
    assert s[0, 1] > 0 and s[0, 2] >= s[0, 1]
    assert all(v > 0 for v in s.s.values())


def test_tail_tolerance_unreachable():
    ps = make_part_set([1])
    with pytest.raises(SeriesTolError):
        series_sum(ps, 0.999999, 2, 1, tol=1e-300)


def test_argument_validation():
    ps = make_part_set([1])
    with pytest.raises(ValueError):
        series_sum(ps, 0.6, 3, 0)
    with pytest.raises(ValueError):
        series_sum(ps, 1.2, 1, 0)


def test_b1_rearranged_form(part_set):
    c = asymptotic_constants(part_set)
    s = c.sums.s
    L1, L2, K1, K2, KL = s[1, 0], s[2, 0], s[0, 1], s[0, 2], s[1, 1]
    alt = (L2 * K1**2 - 2 * L1 * KL * K1 + L1**2 * K2) / K1**3
    assert c.b1 == pytest.approx(alt, rel=1e-13)
    assert c.a1 == pytest.approx(L1 / K1, rel=1e-15)
    assert c.a1 > 0 and c.b1 > 0


def test_intercept_lines_sum_to_b0(part_set):
    c = asymptotic_constants(part_set)
    assert math.fsum(variance_intercept_lines(c.sums)) == c.b0


@pytest.mark.parametrize("excluded", [(1,), (2,), (1, 4)])
def test_lines_against_moment_recurrence(excluded):
    ps = make_part_set(excluded)
    c = asymptotic_constants(ps)
    t = log_moment_table(ps, 401, t_max=2)
    for n in (200, 400):
        assert abs(t.mean(n) - c.mu(n)) < 1e-6
        assert abs(t.variance(n) - c.sigma2(n)) < 1e-4
    assert abs((t.mean(401) - t.mean(400)) - c.a1) < 1e-8
    assert abs((t.variance(401) - t.variance(400)) - c.b1) < 1e-8


def test_json_keys():
    out = asymptotic_constants(make_part_set([1])).to_json()
    assert set(out) == {"p", "a1", "a0", "b1", "b0", "prefactor", "series_sums"}
    assert "s21" in out["series_sums"]
