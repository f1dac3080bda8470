"""Normal form g = u · diag(π^d) · σ · k with u ∈ N(K) and k in the Iwahori subgroup."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, TypeVar

from .series import (
    DEFAULT_WINDOW,
    InsufficientPrecision,
    NotInvertible,
    SeriesMatrix,
    TruncatedSeries,
    det,
)

T = TypeVar("T")


@dataclass(frozen=True)
class Cell:
    """Label (d, σ) of the double coset N(K)·diag(π^d)·σ·Iw.

    ``sigma`` is one-line notation, 1-based: sigma[j-1] = σ(j), and the
    permutation matrix has entry (i, j) = 1 iff i = σ(j).
    """

    d: tuple[int, ...]
    sigma: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(int(x) for x in self.d))
        object.__setattr__(self, "sigma", tuple(int(x) for x in self.sigma))
        if len(self.d) != len(self.sigma):
            raise ValueError("d and sigma have different lengths")
        if sorted(self.sigma) != list(range(1, len(self.sigma) + 1)):
            raise ValueError(f"{self.sigma} is not a permutation of 1..{len(self.sigma)}")

    @property
    def n(self) -> int:
        return len(self.d)

    def matrix(self, p: int) -> SeriesMatrix:
        """diag(π^d) · σ as an exact matrix."""
        n = self.n
        zero = TruncatedSeries.zero(p)
        rows = [[zero] * n for _ in range(n)]
        for j, s in enumerate(self.sigma):
            rows[s - 1][j] = TruncatedSeries.monomial(p, self.d[s - 1])
        return SeriesMatrix(p, rows)

    def to_json(self) -> dict:
        return {"d": list(self.d), "sigma": list(self.sigma)}

    @classmethod
    def from_json(cls, data) -> Cell:
        return cls(tuple(data["d"]), tuple(data["sigma"]))


@dataclass(frozen=True)
class Decomposition:
    u: SeriesMatrix
    cell: Cell
    k: SeriesMatrix

    def reconstruct(self) -> SeriesMatrix:
        return self.u @ self.cell.matrix(self.u.p) @ self.k


def _choose_pivot(row: list[TruncatedSeries], free: list[int]) -> int:
    """Leftmost free column of minimal valuation, certified against unknown entries."""
    known = [(int(row[c].valuation()), c) for c in free if not row[c].is_zero_at_precision()]
    if not known:
        if all(row[c].is_exact_zero for c in free):
            raise NotInvertible("row vanishes on the free columns")
        raise InsufficientPrecision("no entry of certified valuation in the pivot row")
    vmin = min(v for v, _ in known)
    col = min(c for v, c in known if v == vmin)
    for c in free:
        x = row[c]
        if x.is_zero_at_precision() and not x.is_exact_zero:
            # left of the pivot we need valuation > vmin, right of it ≥ vmin
            need = vmin + 1 if c < col else vmin
            if x.prec < need:
                raise InsufficientPrecision("pivot choice depends on unknown coefficients")
    return col


def decompose(g: SeriesMatrix, prec: int | None = None) -> Decomposition:
    """Return (u, cell, k) with g = u · diag(π^d) · σ · k.

    Rows are processed bottom-up.  Row r is first cleared on the columns
    already pivoted by lower rows (row operations, absorbed into u), then the
    pivot is the leftmost free column of minimal valuation; the pivot column
    is scaled by a unit to π^d and the remaining free entries of the row are
    cleared with column operations.  Columns right of the pivot need
    O-multiples and columns left of it πO-multiples, so every column
    operation lies in Iw and is absorbed into k.

    ``prec`` is the absolute precision used when a unit with an infinite
    inverse has to be inverted.
    """
    n, p = g.n, g.p
    if g.is_exact() and det(g).is_exact_zero:
        raise NotInvertible("singular matrix")
    zero = TruncatedSeries.zero(p)
    m = [list(r) for r in g.entries]
    u = [list(r) for r in SeriesMatrix.identity(n, p).entries]
    k = [list(r) for r in SeriesMatrix.identity(n, p).entries]
    pivot_col: dict[int, int] = {}
    d = [0] * n
    free = list(range(n))

    for r in reversed(range(n)):
        # (i) row r -= x/π^{d_r2} · row r2 for each lower pivot row r2
        for r2 in range(r + 1, n):
            c2 = pivot_col[r2]
            x = m[r][c2]
            if x.is_exact_zero:
                continue
            mult = x.shift(-d[r2])
            m[r][c2] = zero
            for i in range(n):
                if not u[i][r].is_exact_zero:
                    u[i][r2] = u[i][r2] + mult * u[i][r]

        # (ii) pivot
        c = _choose_pivot(m[r], free)
        v = int(m[r][c].valuation())

        # (iii) scale column c by the inverse of the unit part
        unit = m[r][c].shift(-v)
        if not (unit.is_monomial() and unit.coeffs == {0: 1}):
            winv = unit.inverse(prec)
            for i in range(r):
                if not m[i][c].is_exact_zero:
                    m[i][c] = m[i][c] * winv
            k[c] = [x * unit for x in k[c]]
        m[r][c] = TruncatedSeries.monomial(p, v)

        # (iv) clear the other free entries of row r
        for c2 in free:
            if c2 == c or m[r][c2].is_exact_zero:
                continue
            mult = m[r][c2].shift(-v)
            if not mult.val_at_least(0 if c2 > c else 1):
                raise AssertionError("column operation outside the Iwahori subgroup")
            m[r][c2] = zero
            for i in range(r):
                if not m[i][c].is_exact_zero:
                    m[i][c2] = m[i][c2] - mult * m[i][c]
            k[c] = [x + mult * y for x, y in zip(k[c], k[c2])]

        pivot_col[r] = c
        d[r] = v
        free.remove(c)

    sigma = [0] * n
    for r, c in pivot_col.items():
        sigma[c] = r + 1
    return Decomposition(SeriesMatrix(p, u), Cell(tuple(d), tuple(sigma)), SeriesMatrix(p, k))


def residue_character(u: SeriesMatrix) -> int:
    """Σ_i (coefficient of π^{-1} in u_{i,i+1}) mod p."""
    return sum(u.entries[i][i + 1].residue_coeff() for i in range(u.n - 1)) % u.p


def widen(window: Sequence[int]) -> tuple[int, int]:
    lo, hi = window
    return 2 * lo, 2 * hi


def retry_widening(fn: Callable[[tuple[int, int]], T],
                   window: Sequence[int] = DEFAULT_WINDOW,
                   max_hi: int = 64) -> T:
    """Call fn(window), doubling the window on InsufficientPrecision until hi exceeds max_hi."""
    window = tuple(window)
    while True:
        try:
            return fn(window)
        except InsufficientPrecision:
            window = widen(window)
            if window[1] > max_hi:
                raise
