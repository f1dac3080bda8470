"""Iwahori-fixed Whittaker function of the λ-twisted Steinberg representation of GL_n."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .decomposition import Cell, decompose, residue_character
from .scalars import LAM, Q, ZERO, CycloScalar, QLPoly, psi_char, specialize
from .series import SeriesMatrix


@dataclass(frozen=True)
class WhittakerContext:
    n: int
    p: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")


def inv_count(sigma: Sequence[int]) -> int:
    return sum(1 for i, j in combinations(range(len(sigma)), 2) if sigma[i] > sigma[j])


def sign(sigma: Sequence[int]) -> int:
    return -1 if inv_count(sigma) % 2 else 1


def inverse_perm(sigma: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(sigma)
    for j, s in enumerate(sigma):
        inv[s - 1] = j + 1
    return tuple(inv)


def _spread(d: Sequence[int]) -> int:
    """Σ_{i<j} (d_i - d_j)."""
    return sum(d[i] - d[j] for i, j in combinations(range(len(d)), 2))


def is_dominant(d: Sequence[int]) -> bool:
    return all(d[i] >= d[i + 1] for i in range(len(d) - 1))


def vol_sigma(sigma: Sequence[int]) -> QLPoly:
    """Volume of Iw·σ·Iw (vol(Iw) = 1): q^{inv(σ)}."""
    return Q ** inv_count(sigma)


def vol_dominant(d: Sequence[int]) -> QLPoly:
    """Volume of Iw·diag(π^d)·Iw for dominant d: q^{Σ_{i<j}(d_i - d_j)}."""
    if not is_dominant(d):
        raise ValueError(f"{tuple(d)} is not dominant")
    return Q ** _spread(d)


def delta_lambda(d: Sequence[int]) -> QLPoly:
    """Modulus character times λ^{val det} at diag(π^d)."""
    return LAM ** sum(d) * Q ** (-_spread(d))


def support_ok(cell: Cell) -> bool:
    """d_i ≥ d_{i+1} − [σ^{-1}(i) > σ^{-1}(i+1)] for all i."""
    inv = inverse_perm(cell.sigma)
    d = cell.d
    return all(d[i] >= d[i + 1] - (1 if inv[i] > inv[i + 1] else 0) for i in range(cell.n - 1))


def whittaker_formula(cell: Cell) -> QLPoly:
    """W_λ(diag(π^d)·σ) = sign(σ) λ^{Σd} / (q^{Σ_{i<j}(d_i-d_j)} · q^{inv(σ)}) on the support.

    The sign(σ) factor is forced by T_s W = −W: at the identity,
    (T_s W)(1) = q·W(s) must equal −1.  The GL_2 antidiagonal table without
    the sign fails that identity.
    """
    if not support_ok(cell):
        return ZERO
    return sign(cell.sigma) * LAM ** sum(cell.d) * Q ** (-_spread(cell.d) - inv_count(cell.sigma))


def unsigned_whittaker_formula(cell: Cell) -> QLPoly:
    """The same values with sign(σ) dropped (kept as a negative control)."""
    return sign(cell.sigma) * whittaker_formula(cell)


def whittaker_eval(g: SeriesMatrix, ctx: WhittakerContext | None = None,
                   prec: int | None = None, formula=whittaker_formula) -> CycloScalar:
    """W_λ(g) = ψ(residue(u)) · W_λ(cell) for g = u · diag(π^d) · σ · k."""
    p = g.p if ctx is None or ctx.p is None else ctx.p
    if g.p != p:
        raise ValueError(f"matrix over p={g.p}, context has p={p}")
    dec = decompose(g, prec)
    value = formula(dec.cell)
    if value.is_zero():
        return CycloScalar.zero(p)
    return psi_char(residue_character(dec.u), p) * specialize(value, p)


def evaluate_with_phase(g: SeriesMatrix, prec: int | None = None) -> tuple[Cell, int, CycloScalar]:
    """Cell, residue class and value of W_λ at g."""
    dec = decompose(g, prec)
    res = residue_character(dec.u)
    value = whittaker_formula(dec.cell)
    out = CycloScalar.zero(g.p) if value.is_zero() else psi_char(res, g.p) * specialize(value, g.p)
    return dec.cell, res, out

