import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import exact_series, random_poly, truncated_series
from iwahori_whittaker.series import (
    InsufficientPrecision,
    NotInvertible,
    SeriesMatrix,
    TruncatedSeries,
    iwahori_member,
    mat_inv,
    matrix,
)

P = 5


def s(coeffs, prec=None, p=P):
    return TruncatedSeries(p, coeffs, prec)


def naive_product(a: dict, b: dict, p: int) -> dict:
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            out[e1 + e2] = (out.get(e1 + e2, 0) + c1 * c2) % p
    return {e: c for e, c in out.items() if c}


def test_window_intersection_on_add():
    x = s({1: 1, 2: 1}, prec=6) + s({1: -1}, prec=4)
    assert x.coeffs == {2: 1}
    assert x.prec == 4


def test_valuation_and_residue():
    assert s({-2: 1, 0: 1}).valuation() == -2
    assert s({-1: 3}).residue_coeff() == 3
    assert TruncatedSeries.zero(P).valuation() == math.inf


def test_unknown_valuation_raises():
    with pytest.raises(InsufficientPrecision):
        s({}, prec=3).valuation()
    with pytest.raises(InsufficientPrecision):
        s({}, prec=3).val_at_least(5)
    assert s({}, prec=3).val_at_least(3)


def test_exact_zero_is_distinct_from_truncated_zero():
    assert TruncatedSeries.zero(P).is_exact_zero
    assert not s({}, prec=2).is_exact_zero
    assert s({}, prec=2).is_zero_at_precision()


def test_product_precision():
    # (π + O(π^3)) · (1 + π) = π + π² + O(π^3)
    x = s({1: 1}, prec=3) * s({0: 1, 1: 1})
    assert x.prec == 3 and x.coeffs == {1: 1, 2: 1}
    # (π^{-1} + O(π^2)) · (π + O(π^4)) is known up to π^3
    y = s({-1: 1}, prec=2) * s({1: 1}, prec=4)
    assert y.prec == 3


def test_inverse_of_unit():
    u = s({0: 1, 1: 1})
    inv = u.inverse(8)
    assert (u * inv).congruent(TruncatedSeries.one(P))
    assert inv.prec == 8
    assert s({2: 3}).inverse() == s({-2: 2})
    with pytest.raises(NotInvertible):
        TruncatedSeries.zero(P).inverse()


@given(exact_series(P), exact_series(P), exact_series(P))
def test_exact_ring_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z


@given(truncated_series(P), truncated_series(P))
def test_products_agree_with_naive_convolution_where_known(x, y):
    prod = x * y
    ref = naive_product(x.coeffs, y.coeffs, P)
    if prod.prec is None:
        assert prod.coeffs == ref
    else:
        assert prod.coeffs == {e: c for e, c in ref.items() if e < prod.prec}


@given(truncated_series(P), truncated_series(P), st.data())
def test_answers_survive_filling_in_unknown_coefficients(x, y, data):
    # perturb beyond the known window and compare where the result claims knowledge
    def fill(t):
        if t.prec is None:
            return t
        extra = data.draw(st.dictionaries(st.integers(t.prec, t.prec + 3), st.integers(0, P - 1)))
        return TruncatedSeries(P, {**extra, **t.coeffs}, t.prec + 4)
    prod, alt = x * y, fill(x) * fill(y)
    assert prod.congruent(alt)


@given(exact_series(P, lo=0, hi=3))
def test_unit_inverse_property(x):
    u = x + 1 if x.coeff(0) != P - 1 else x + 2
    inv = u.inverse(6)
    assert (u * inv).congruent(TruncatedSeries.one(P))


def test_json_round_trip():
    x = s({-1: 2, 3: 1}, prec=8)
    assert TruncatedSeries.from_json(x.to_json(), P) == x
    assert TruncatedSeries.from_json({"exact_zero": True, "coeffs": []}, P).is_exact_zero
    with pytest.raises(ValueError):
        TruncatedSeries.from_json({"exact_zero": False, "coeffs": [[9, 1]]}, P)


def test_matrix_examples():
    p = 3
    a = SeriesMatrix.perm((2, 3, 1), p)
    b = SeriesMatrix.perm((3, 1, 2), p)
    assert a @ b == SeriesMatrix.perm((1, 2, 3), p)
    sigma, tau = (2, 1, 3), (1, 3, 2)
    composite = tuple(sigma[t - 1] for t in tau)
    assert SeriesMatrix.perm(sigma, p) @ SeriesMatrix.perm(tau, p) == SeriesMatrix.perm(composite, p)
    assert mat_inv(SeriesMatrix.diag((1, 0), p)) == SeriesMatrix.diag((-1, 0), p)


def test_iwahori_examples():
    p = 3
    assert iwahori_member(SeriesMatrix.identity(2, p))
    assert not iwahori_member(SeriesMatrix.diag((1, 0), p))
    assert not iwahori_member(matrix(p, [[1, {-1: 1}], [0, 1]]))
    assert not iwahori_member(matrix(p, [[1, 0], [1, 1]]))
    assert iwahori_member(matrix(p, [[2, 1], [{1: 1}, 1]]))


@pytest.mark.parametrize("seed", range(20))
def test_inverse_of_random_matrix(seed):
    rng = np.random.default_rng(seed)
    p, n = 3, 3
    while True:
        a = SeriesMatrix(p, [[random_poly(p, rng, -2, 2) for _ in range(n)] for _ in range(n)])
        try:
            inv = mat_inv(a, 12)
            break
        except NotInvertible:
            continue
    assert (a @ inv).congruent(SeriesMatrix.identity(n, p))


def test_matrix_json_round_trip():
    m = matrix(3, [[{-1: 1, 2: 2}, 0], [{1: 1}, 1]])
    assert SeriesMatrix.from_json(m.to_json()) == m
