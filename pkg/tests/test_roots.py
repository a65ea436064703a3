import math
from fractions import Fraction

import numpy as np
import pytest

from complab.part_set import TruncatedPartSet, denominator_polynomial, make_part_set
from complab.roots import RootGapError, all_roots, principal_root, truncated_principal_root


def _rational_bisection(coeffs, lo=Fraction(1, 2), hi=Fraction(1), bits=70):
    def g(x):
        return sum(c * x**j for j, c in enumerate(coeffs))

    for _ in range(bits):
        mid = (lo + hi) / 2
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return float((lo + hi) / 2)


def test_golden_ratio():
    assert principal_root(make_part_set([1])) == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-15)


def test_two_free_root_against_rational_bisection():
    ps = make_part_set([2])
    p = principal_root(ps)
    assert p == pytest.approx(_rational_bisection((1, -2, 1, -1)), abs=1e-14)
    assert round(p, 6) == 0.569840
    poly = denominator_polynomial(ps)
    assert poly(p - 1e-9) > 0 > poly(p + 1e-9)


def test_principal_root_in_interval(part_set):
    p = principal_root(part_set)
    assert 0.5 < p < 1
    s = p / (1 - p) - sum(p**k for k in part_set.excluded)
    assert s == pytest.approx(1.0, abs=1e-12)


def test_one_free_roots():
    prof = all_roots(make_part_set([1]))
    values = [z.value for z in prof.roots]
    assert values[0].real == pytest.approx(0.6180339887, abs=1e-10)
    assert values[1].real == pytest.approx(-1.6180339887, abs=1e-10)
    assert prof.r == pytest.approx((1 + math.sqrt(5)) / 2, abs=1e-12)


def test_complex_pair():
    prof = all_roots(make_part_set([1, 2]))
    assert len(prof.roots) == 3
    a, b = prof.roots[1].value, prof.roots[2].value
    assert a.imag != 0 and a == pytest.approx(b.conjugate(), abs=1e-12)
    assert abs(a) == pytest.approx(abs(b)) and abs(a) > prof.p


def test_profile_invariants(part_set):
    prof = all_roots(part_set)
    poly = denominator_polynomial(part_set)
    assert sum(z.multiplicity for z in prof.roots) == poly.degree
    assert prof.roots[0].value == pytest.approx(principal_root(part_set), abs=1e-11)
    assert all(abs(z.value) > prof.p for z in prof.roots[1:])
    assert all(z.scaled_residual < 1e-10 for z in prof.roots)
    mags = [abs(z.value) for z in prof.roots]
    assert mags == sorted(mags)
    assert abs(poly.derivative(prof.p)) > 1e-6


def test_conjugate_closure_and_reconstruction(part_set):
    prof = all_roots(part_set)
    zs = [z.value for z in prof.roots for _ in range(z.multiplicity)]
    for z in zs:
        assert min(abs(w - z.conjugate()) for w in zs) < 1e-9
    c = np.array(denominator_polynomial(part_set).coefficients[::-1], dtype=float)
    rebuilt = np.poly(zs).real * c[0]
    assert np.allclose(rebuilt, c, rtol=0, atol=1e-9 * np.abs(c).max())


def test_newton_polish_is_stable(part_set):
    prof = all_roots(part_set)
    desc = np.array(denominator_polynomial(part_set).coefficients[::-1], dtype=float)
    for z in prof.roots:
        if z.multiplicity > 1:
            continue
        w = z.value - np.polyval(desc, z.value) / np.polyval(np.polyder(desc), z.value)
        assert abs(w - z.value) <= 1e-11


@pytest.mark.parametrize("excluded", [(1, 3, 5), (2, 3, 7, 8), (1, 2, 3, 4, 5, 6)])
def test_larger_excluded_sets(excluded):
    prof = all_roots(make_part_set(excluded))
    assert sum(z.multiplicity for z in prof.roots) == max(excluded) + 1
    assert prof.r - prof.p > 1e-9


def test_gap_threshold_diagnostic():
    with pytest.raises(RootGapError):
        all_roots(make_part_set([1]), gap_threshold=10.0)


def test_truncated_root():
    ps = make_part_set([1])
    assert truncated_principal_root(TruncatedPartSet(ps, 2)) == 1.0
    q = truncated_principal_root(TruncatedPartSet(ps, 3))  # 1 - x^2 - x^3
    assert 1 - q**2 - q**3 == pytest.approx(0, abs=1e-14)
    assert truncated_principal_root(TruncatedPartSet(ps, 200)) == pytest.approx(principal_root(ps), abs=1e-14)
