"""Random inputs shared by the property suites."""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from iwahori_whittaker.decomposition import Cell
from iwahori_whittaker.scalars import CycloScalar, QLPoly
from iwahori_whittaker.series import SeriesMatrix, TruncatedSeries

PRIMES = (2, 3, 5)


def qlpolys(max_terms: int = 4, span: int = 3):
    term = st.tuples(st.integers(-span, span), st.integers(-span, span))
    return st.dictionaries(term, st.integers(-5, 5), max_size=max_terms).map(QLPoly)


def cyclos(p: int, max_terms: int = 3):
    coeff = st.fractions(min_value=-4, max_value=4, max_denominator=5)
    vec = st.lists(coeff, min_size=p - 1, max_size=p - 1)
    return st.dictionaries(st.integers(-2, 2), vec, max_size=max_terms).map(
        lambda t: CycloScalar(p, t))


def exact_series(p: int, lo: int = -3, hi: int = 4):
    return st.dictionaries(st.integers(lo, hi - 1), st.integers(0, p - 1), max_size=4).map(
        lambda c: TruncatedSeries.exact(p, c))


def truncated_series(p: int, lo: int = -3, hi: int = 6):
    def build(args):
        coeffs, prec = args
        return TruncatedSeries(p, coeffs, prec)
    return st.tuples(st.dictionaries(st.integers(lo, hi - 1), st.integers(0, p - 1), max_size=4),
                     st.integers(lo, hi)).map(build)


def random_poly(p: int, rng: np.random.Generator, lo: int, hi: int, terms: int = 2) -> TruncatedSeries:
    exps = rng.integers(lo, hi + 1, size=terms)
    return TruncatedSeries.exact(p, {int(e): int(rng.integers(0, p)) for e in exps})


def random_unipotent(n: int, p: int, rng: np.random.Generator, lo: int = -2, hi: int = 2) -> SeriesMatrix:
    one, zero = TruncatedSeries.one(p), TruncatedSeries.zero(p)
    rows = [[one if i == j else zero for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            rows[i][j] = random_poly(p, rng, lo, hi)
    return SeriesMatrix(p, rows)


def random_iwahori(n: int, p: int, rng: np.random.Generator, hi: int = 2) -> SeriesMatrix:
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            x = random_poly(p, rng, 1 if i > j else 0, hi)
            if i == j:
                x = TruncatedSeries.exact(
                    p, {**x.coeffs, 0: int(rng.integers(1, p))})
            row.append(x)
        rows.append(row)
    return SeriesMatrix(p, rows)


def random_cell(n: int, rng: np.random.Generator, bound: int = 2) -> Cell:
    d = tuple(int(x) for x in rng.integers(-bound, bound + 1, size=n))
    return Cell(d, tuple(int(x) + 1 for x in rng.permutation(n)))
