import pytest
from hypothesis import given, strategies as st

from complab.part_set import (
    PartSet,
    TruncatedPartSet,
    contains,
    denominator_polynomial,
    make_part_set,
    parse_exclude,
)


def test_make_part_set_normalises():
    ps = make_part_set([2, 2, 1])
    assert ps.excluded == (1, 2)
    assert ps.max_excluded == 2


def test_one_free_case():
    ps = make_part_set([1])
    assert ps.excluded == (1,) and ps.max_excluded == 1
    assert ps.min_part == 2


def test_empty_excluded_rejected():
    with pytest.raises(ValueError, match="S must be a proper subset"):
        make_part_set([])


@pytest.mark.parametrize("bad", [[0], [-3, 2]])
def test_nonpositive_rejected(bad):
    with pytest.raises(ValueError):
        make_part_set(bad)


def test_direct_construction_requires_ascending():
    with pytest.raises(ValueError):
        PartSet((3, 1))


@pytest.mark.parametrize("excluded,k,expected", [((1,), 1, False), ((1,), 2, True), ((1, 4), 5, True), ((1, 4), 4, False)])
def test_contains(excluded, k, expected):
    assert contains(make_part_set(excluded), k) is expected


@pytest.mark.parametrize(
    "excluded,coeffs",
    [
        ((1,), (1, -1, -1)),
        ((2,), (1, -2, 1, -1)),
        ((1, 2), (1, -1, 0, -1)),
    ],
)
def test_denominator_polynomial_examples(excluded, coeffs):
    assert denominator_polynomial(make_part_set(excluded)).coefficients == coeffs


excluded_sets = st.lists(st.integers(1, 9), min_size=1, max_size=5)


@given(excluded_sets)
def test_denominator_structure(ex):
    ps = make_part_set(ex)
    poly = denominator_polynomial(ps)
    c = poly.coefficients
    assert poly.degree == ps.max_excluded + 1
    assert c[0] == 1
    assert c[1] == -2 + (1 if 1 in ps.excluded else 0)
    assert poly(1) == -1


@given(excluded_sets, st.integers(0, 6))
def test_denominator_matches_series_product(ex, extra):
    # (1 - x) * (1 - sum_{k in S, k <= K} x^k) agrees with the polynomial up to x^K
    ps = make_part_set(ex)
    K = ps.max_excluded + 1 + extra
    f = [1] + [-(1 if k in ps else 0) for k in range(1, K + 1)]
    prod = [f[0]] + [f[i] - f[i - 1] for i in range(1, K + 1)]
    c = list(denominator_polynomial(ps).coefficients) + [0] * K
    assert prod[: K + 1] == c[: K + 1]


def test_truncated_part_set():
    tps = TruncatedPartSet(make_part_set([1]), 3)
    assert tps.parts() == [2, 3]
    assert 3 in tps and 4 not in tps and 1 not in tps
    with pytest.raises(ValueError):
        TruncatedPartSet(make_part_set([1, 2]), 2)


def test_parse_exclude():
    assert parse_exclude("1,4").excluded == (1, 4)
    assert parse_exclude(" 4, 1 ,4").excluded == (1, 4)
    with pytest.raises(ValueError, match="syntax"):
        parse_exclude("1,x")


def test_json_shape():
    assert make_part_set([4, 1]).to_json() == {"excluded": [1, 4]}
