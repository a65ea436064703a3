import math

import numpy as np
import pytest
from scipy.stats import chisquare

from complab.counting import count_exact, log_moment_table
from complab.enumeration import enumerate_compositions
from complab.part_set import TruncatedPartSet, make_part_set
from complab.sampler import (
    CompositionSampler,
    UnrepresentableError,
    make_generator,
    sample_composition,
    sample_log_products,
    sample_truncated,
)


def _tally(sampler, count, seed):
    out = {}
    for a in sampler.iter_parts(count, make_generator(seed)):
        key = tuple(int(k) for k in a)
        out[key] = out.get(key, 0) + 1
    return out


def test_three_compositions_of_five():
    N = 30_000
    got = _tally(CompositionSampler(make_part_set([1]), 5), N, 1)
    assert set(got) == {(5,), (3, 2), (2, 3)}
    sd = math.sqrt(N * (1 / 3) * (2 / 3))
    for v in got.values():
        assert abs(v - N / 3) < 3 * sd


def test_single_part_minimum():
    ps = make_part_set([1, 2])
    gen = make_generator(3)
    assert all(sample_composition(ps, 3, gen).parts == (3,) for _ in range(20))


def test_unrepresentable():
    with pytest.raises(UnrepresentableError):
        sample_composition(make_part_set([1]), 1, make_generator(0))
    with pytest.raises(UnrepresentableError):
        CompositionSampler(TruncatedPartSet(make_part_set([1]), 2), 7)


def test_truncated_two_way():
    N = 20_000
    tps = TruncatedPartSet(make_part_set([1]), 3)
    got = _tally(CompositionSampler(tps, 6), N, 5)
    assert set(got) == {(2, 2, 2), (3, 3)}
    assert abs(got[(3, 3)] - N / 2) < 3 * math.sqrt(N / 4)
    assert sample_truncated(tps, 6, make_generator(0)).n == 6


def test_truncation_inactive_matches_support():
    ps = make_part_set([2])
    full = CompositionSampler(ps, 9)
    trunc = CompositionSampler(TruncatedPartSet(ps, 9), 9)
    a, b = _tally(full, 40_000, 2), _tally(trunc, 40_000, 2)
    support = set(enumerate_compositions(ps, 9))
    assert set(a) == set(b) == support


@pytest.mark.parametrize("excluded,n", [((2,), 10), ((1, 4), 14), ((3,), 9)])
def test_chi_square_small_n(excluded, n):
    ps = make_part_set(excluded)
    support = list(enumerate_compositions(ps, n))
    got = _tally(CompositionSampler(ps, n), 60_000, 11)
    assert set(got) <= set(support)
    counts = [got.get(c, 0) for c in support]
    assert chisquare(counts).pvalue > 1e-3


def test_parts_bounded_by_beta():
    tps = TruncatedPartSet(make_part_set([1]), 5)
    s = CompositionSampler(tps, 60)
    biggest = max(int(a.max()) for a in s.iter_parts(1_000_000, make_generator(9)))
    assert biggest <= 5


@pytest.mark.parametrize("excluded", [(1,), (2,), (1, 4)])
def test_composition_invariants_large_n(excluded):
    ps = make_part_set(excluded)
    s = CompositionSampler(ps, 3000)
    for a in s.iter_parts(300, make_generator(4)):
        assert a.sum() == 3000
        assert all(int(k) in ps for k in np.unique(a))


def test_gcd_reduced_truncation():
    tps = TruncatedPartSet(make_part_set([1, 3]), 4)  # parts {2, 4}
    with pytest.raises(UnrepresentableError):
        CompositionSampler(tps, 11)
    got = _tally(CompositionSampler(tps, 8), 20_000, 6)
    support = list(enumerate_compositions(tps, 8))
    assert set(got) == set(support)
    assert chisquare([got[c] for c in support]).pvalue > 1e-3


def test_first_and_last_part_laws_at_moderate_n():
    # n large enough that the bulk draws are used for first parts
    ps = make_part_set([1])
    n, N = 400, 100_000
    A = count_exact(ps, n).counts
    s = CompositionSampler(ps, n)
    assert n > s.R
    arrays = list(s.iter_parts(N, make_generator(21)))
    firsts = np.bincount([int(a[0]) for a in arrays], minlength=n + 1)
    lasts = np.bincount([int(a[-1]) for a in arrays], minlength=n + 1)
    ks = list(range(2, 12))
    expected = np.array([A[n - k] / A[n] for k in ks])
    # the law of the last part equals that of the first (reversal symmetry)
    for observed in (firsts, lasts):
        obs = np.append(observed[ks], N - observed[ks].sum())
        exp = np.append(expected, 1 - expected.sum()) * N
        assert chisquare(obs, exp).pvalue > 1e-3


def test_mean_against_recurrence():
    ps = make_part_set([2])
    n, N = 300, 20_000
    logs = CompositionSampler(ps, n).log_products(N, make_generator(8))
    t = log_moment_table(ps, n, t_max=2)
    assert abs(logs.mean() - t.mean(n)) < 5 * math.sqrt(t.variance(n) / N)


def test_determinism_and_streams():
    s = CompositionSampler(make_part_set([1]), 500)
    a = [x.tolist() for x in s.iter_parts(50, make_generator(42, 0))]
    b = [x.tolist() for x in s.iter_parts(50, make_generator(42, 0))]
    c = [x.tolist() for x in s.iter_parts(50, make_generator(42, 1))]
    assert a == b and a != c


def test_thread_count_does_not_change_results():
    ps = make_part_set([1])
    one = sample_log_products(ps, 200, 25_000, seed=3, threads=1)
    four = sample_log_products(ps, 200, 25_000, seed=3, threads=4)
    assert np.array_equal(one, four)


def test_composition_type():
    c = sample_composition(make_part_set([1]), 30, make_generator(2))
    assert c.n == 30 and len(c) == len(c.parts)
    assert c.log_product == pytest.approx(math.log(c.product()))
