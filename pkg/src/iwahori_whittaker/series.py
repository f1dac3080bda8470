"""Laurent series over F_p with explicit precision, and matrices of them.

A ``TruncatedSeries`` is Σ_{e < prec} c_e π^e + O(π^prec).  ``prec=None``
marks an exact element (a Laurent polynomial with nothing unknown), which
is what permutation and diagonal matrices need to stay exact.
"""

from __future__ import annotations

import math
from itertools import permutations
from typing import Iterable, Mapping, Sequence

from .scalars import is_prime

DEFAULT_WINDOW = (-4, 8)


class InsufficientPrecision(ArithmeticError):
    """A requested quantity depends on coefficients outside the known window."""


class NotInvertible(ArithmeticError):
    pass


def _min_prec(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class TruncatedSeries:
    __slots__ = ("p", "_coeffs", "prec")

    def __init__(self, p: int, coeffs: Mapping[int, int] | None = None, prec: int | None = None):
        if not is_prime(p):
            raise ValueError(f"{p!r} is not a prime")
        self.p = p
        self.prec = prec
        clean = {}
        for e, c in (coeffs or {}).items():
            c = int(c) % p
            if c and (prec is None or e < prec):
                clean[int(e)] = c
        self._coeffs = clean

    # constructors

    @classmethod
    def exact(cls, p: int, coeffs: Mapping[int, int] | None = None) -> TruncatedSeries:
        return cls(p, coeffs, None)

    @classmethod
    def zero(cls, p: int) -> TruncatedSeries:
        return cls(p)

    @classmethod
    def one(cls, p: int) -> TruncatedSeries:
        return cls(p, {0: 1})

    @classmethod
    def monomial(cls, p: int, e: int, c: int = 1) -> TruncatedSeries:
        return cls(p, {e: c})

    @classmethod
    def constant(cls, p: int, c: int) -> TruncatedSeries:
        return cls(p, {0: c})

    # inspection

    @property
    def coeffs(self) -> dict[int, int]:
        return dict(self._coeffs)

    @property
    def is_exact(self) -> bool:
        return self.prec is None

    @property
    def is_exact_zero(self) -> bool:
        return self.prec is None and not self._coeffs

    def is_zero_at_precision(self) -> bool:
        """No nonzero coefficient is known (the element may still be nonzero beyond prec)."""
        return not self._coeffs

    def _val_bound(self) -> float:
        """Certified lower bound for the valuation (exact when a coefficient is known)."""
        if self._coeffs:
            return min(self._coeffs)
        return math.inf if self.prec is None else self.prec

    def valuation(self) -> float:
        if self._coeffs:
            return min(self._coeffs)
        if self.prec is None:
            return math.inf
        raise InsufficientPrecision(f"valuation unknown: no coefficient below π^{self.prec}")

    def val_at_least(self, m: int) -> bool:
        """Decide valuation ≥ m, raising if that depends on unknown coefficients."""
        if any(e < m for e in self._coeffs):
            return False
        if self.prec is None or self.prec >= m:
            return True
        raise InsufficientPrecision(f"cannot decide valuation ≥ {m} at precision {self.prec}")

    def coeff(self, e: int) -> int:
        if self.prec is not None and e >= self.prec:
            raise InsufficientPrecision(f"coefficient of π^{e} unknown (precision {self.prec})")
        return self._coeffs.get(e, 0)

    def residue_coeff(self) -> int:
        return self.coeff(-1)

    def is_monomial(self) -> bool:
        return self.prec is None and len(self._coeffs) == 1

    # arithmetic

    def _coerce(self, other) -> TruncatedSeries:
        if isinstance(other, TruncatedSeries):
            if other.p != self.p:
                raise ValueError(f"cannot mix p={self.p} and p={other.p}")
            return other
        if isinstance(other, int):
            return TruncatedSeries.constant(self.p, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._coeffs)
        for e, c in other._coeffs.items():
            out[e] = out.get(e, 0) + c
        return TruncatedSeries(self.p, out, _min_prec(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self) -> TruncatedSeries:
        return TruncatedSeries(self.p, {e: -c for e, c in self._coeffs.items()}, self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p
        if self.is_exact_zero or other.is_exact_zero:
            return TruncatedSeries(p)
        # error terms: O(π^{px})·y and x·O(π^{py})
        prec = None
        if other.prec is not None:
            prec = _min_prec(prec, int(self._val_bound()) + other.prec)
        if self.prec is not None:
            prec = _min_prec(prec, int(other._val_bound()) + self.prec)
        out: dict[int, int] = {}
        for e1, c1 in self._coeffs.items():
            for e2, c2 in other._coeffs.items():
                e = e1 + e2
                if prec is None or e < prec:
                    out[e] = (out.get(e, 0) + c1 * c2) % p
        return TruncatedSeries(p, out, prec)

    __rmul__ = __mul__

    def shift(self, k: int) -> TruncatedSeries:
        """Multiply by π^k (exact)."""
        return TruncatedSeries(
            self.p,
            {e + k: c for e, c in self._coeffs.items()},
            None if self.prec is None else self.prec + k,
        )

    def inverse(self, prec: int | None = None) -> TruncatedSeries:
        """Multiplicative inverse.

        For inexact input the result carries the precision the input supports.
        An exact non-monomial has an infinite inverse; it is truncated at
        absolute precision ``prec`` (default: the upper end of DEFAULT_WINDOW).
        """
        if self.is_exact_zero:
            raise NotInvertible("exact zero")
        v = int(self.valuation())
        p = self.p
        if self.is_monomial():
            return TruncatedSeries(p, {-v: pow(self._coeffs[v], -1, p)})
        if self.prec is None:
            target = DEFAULT_WINDOW[1] if prec is None else prec
            rel = max(target + v, 1)
        else:
            rel = self.prec - v
        unit = [self._coeffs.get(v + i, 0) for i in range(rel)]
        u0inv = pow(unit[0], -1, p)
        inv = [u0inv]
        for k in range(1, rel):
            s = sum(unit[j] * inv[k - j] for j in range(1, k + 1))
            inv.append((-u0inv * s) % p)
        return TruncatedSeries(p, {i - v: c for i, c in enumerate(inv)}, rel - v)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def congruent(self, other) -> bool:
        """Equal wherever both are known."""
        diff = self - self._coerce(other)
        return diff.is_zero_at_precision()

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = TruncatedSeries.constant(self.p, other)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.p, self.prec, self._coeffs) == (other.p, other.prec, other._coeffs)

    def __hash__(self) -> int:
        return hash((self.p, self.prec, frozenset(self._coeffs.items())))

    def with_prec(self, prec: int) -> TruncatedSeries:
        """Forget everything at exponents ≥ prec."""
        return TruncatedSeries(self.p, self._coeffs, _min_prec(self.prec, prec))

    def to_json(self) -> dict:
        out = {"exact_zero": self.is_exact_zero,
               "coeffs": [[e, c] for e, c in sorted(self._coeffs.items())]}
        if self.prec is None and self._coeffs:
            out["exact"] = True
        return out

    @classmethod
    def from_json(cls, data: Mapping, p: int, window: Sequence[int] = DEFAULT_WINDOW) -> TruncatedSeries:
        lo, hi = window
        if data.get("exact_zero"):
            if data.get("coeffs"):
                raise ValueError("exact_zero series with coefficients")
            return cls(p)
        coeffs: dict[int, int] = {}
        for e, c in data.get("coeffs", []):
            e, c = int(e), int(c)
            if not lo <= e < hi:
                raise ValueError(f"exponent {e} outside window [{lo}, {hi})")
            coeffs[e] = coeffs.get(e, 0) + c
        return cls(p, coeffs, None if data.get("exact") else hi)

    def __str__(self) -> str:
        parts = []
        for e, c in sorted(self._coeffs.items()):
            if e == 0:
                parts.append(str(c))
            else:
                mono = "pi" if e == 1 else f"pi^{e}"
                parts.append(mono if c == 1 else f"{c}*{mono}")
        body = " + ".join(parts) if parts else "0"
        return body if self.prec is None else f"{body} + O(pi^{self.prec})"

    def __repr__(self) -> str:
        return f"TruncatedSeries(p={self.p}, {str(self)!r})"


def as_series(x, p: int) -> TruncatedSeries:
    if isinstance(x, TruncatedSeries):
        return x
    return TruncatedSeries.constant(p, int(x))


class SeriesMatrix:
    """Square matrix over F_p((π)); immutable."""

    __slots__ = ("p", "n", "entries")

    def __init__(self, p: int, rows: Sequence[Sequence]):
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        self.p = p
        self.n = n
        self.entries = tuple(tuple(as_series(x, p) for x in r) for r in rows)
        for r in self.entries:
            for x in r:
                if x.p != p:
                    raise ValueError("entries over different primes")

    def __getitem__(self, ij: tuple[int, int]) -> TruncatedSeries:
        i, j = ij
        return self.entries[i][j]

    @classmethod
    def identity(cls, n: int, p: int) -> SeriesMatrix:
        one, zero = TruncatedSeries.one(p), TruncatedSeries.zero(p)
        return cls(p, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, d: Sequence[int], p: int) -> SeriesMatrix:
        """diag(π^{d_1}, …, π^{d_n})."""
        n = len(d)
        zero = TruncatedSeries.zero(p)
        return cls(p, [[TruncatedSeries.monomial(p, d[i]) if i == j else zero
                        for j in range(n)] for i in range(n)])

    @classmethod
    def perm(cls, sigma: Sequence[int], p: int) -> SeriesMatrix:
        """Permutation matrix with entry (i, j) = 1 iff i = σ(j); σ one-line and 1-based."""
        n = len(sigma)
        one, zero = TruncatedSeries.one(p), TruncatedSeries.zero(p)
        return cls(p, [[one if i + 1 == sigma[j] else zero for j in range(n)] for i in range(n)])

    def __matmul__(self, other: SeriesMatrix) -> SeriesMatrix:
        return mat_mul(self, other)

    def congruent(self, other: SeriesMatrix) -> bool:
        return all(a.congruent(b) for ra, rb in zip(self.entries, other.entries)
                   for a, b in zip(ra, rb))

    def is_exact(self) -> bool:
        return all(x.is_exact for r in self.entries for x in r)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SeriesMatrix):
            return NotImplemented
        return self.p == other.p and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.p, self.entries))

    def to_json(self, window: Sequence[int] = DEFAULT_WINDOW) -> dict:
        return {"p": self.p, "n": self.n, "window": list(window),
                "entries": [[x.to_json() for x in r] for r in self.entries]}

    @classmethod
    def from_json(cls, data: Mapping) -> SeriesMatrix:
        p, n = int(data["p"]), int(data["n"])
        window = tuple(data.get("window", DEFAULT_WINDOW))
        rows = data["entries"]
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError(f"entries do not form a {n}x{n} matrix")
        return cls(p, [[TruncatedSeries.from_json(x, p, window) for x in r] for r in rows])

    def __str__(self) -> str:
        return "[" + ",\n ".join("[" + ", ".join(str(x) for x in r) + "]"
                                 for r in self.entries) + "]"

    def __repr__(self) -> str:
        return f"SeriesMatrix(p={self.p},\n{self})"


def mat_mul(a: SeriesMatrix, b: SeriesMatrix) -> SeriesMatrix:
    if a.p != b.p or a.n != b.n:
        raise ValueError("shape or prime mismatch")
    n, p = a.n, a.p
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = TruncatedSeries.zero(p)
            for k in range(n):
                x, y = a.entries[i][k], b.entries[k][j]
                if x.is_exact_zero or y.is_exact_zero:
                    continue
                acc = acc + x * y
            row.append(acc)
        rows.append(row)
    return SeriesMatrix(p, rows)


def _pick_pivot(col: list[TruncatedSeries]) -> int:
    """Index of a certified minimal-valuation entry, preferring exact monomials."""
    known = [(x._val_bound(), i) for i, x in enumerate(col) if x._coeffs]
    if not known:
        if all(x.is_exact_zero for x in col):
            raise NotInvertible("singular matrix")
        raise InsufficientPrecision("no certified pivot")
    vmin = min(v for v, _ in known)
    for x in col:
        if not x._coeffs and not x.is_exact_zero and x.prec < vmin:
            raise InsufficientPrecision("pivot valuation not certified")
    ties = [i for v, i in known if v == vmin]
    for i in ties:
        if col[i].is_monomial():
            return i
    return ties[0]


def mat_inv(a: SeriesMatrix, prec: int | None = None) -> SeriesMatrix:
    """Gauss-Jordan inverse with minimal-valuation pivoting."""
    n, p = a.n, a.p
    m = [list(r) for r in a.entries]
    inv = [list(r) for r in SeriesMatrix.identity(n, p).entries]
    zero = TruncatedSeries.zero(p)
    for j in range(n):
        i = j + _pick_pivot([m[r][j] for r in range(j, n)])
        m[j], m[i] = m[i], m[j]
        inv[j], inv[i] = inv[i], inv[j]
        pinv = m[j][j].inverse(prec)
        m[j] = [x * pinv for x in m[j]]
        inv[j] = [x * pinv for x in inv[j]]
        m[j][j] = TruncatedSeries.one(p)
        for r in range(n):
            if r == j or m[r][j].is_exact_zero:
                continue
            f = m[r][j]
            m[r] = [x - f * y for x, y in zip(m[r], m[j])]
            inv[r] = [x - f * y for x, y in zip(inv[r], inv[j])]
            m[r][j] = zero
    return SeriesMatrix(p, inv)


def det(m: SeriesMatrix) -> TruncatedSeries:
    """Leibniz expansion; no division, so exact entries give an exact determinant."""
    total = TruncatedSeries.zero(m.p)
    for sigma in permutations(range(m.n)):
        term = TruncatedSeries.one(m.p)
        for i, j in enumerate(sigma):
            term = term * m.entries[i][j]
            if term.is_exact_zero:
                break
        else:
            inversions = sum(1 for a in range(m.n) for b in range(a + 1, m.n) if sigma[a] > sigma[b])
            total = total - term if inversions % 2 else total + term
    return total


def iwahori_member(m: SeriesMatrix) -> bool:
    """Membership in the Iwahori subgroup (integral, upper triangular mod π, invertible).

    Given integral entries and a strictly-lower part in πO, the determinant is
    congruent to the product of the diagonal mod π, so it is a unit exactly
    when every diagonal entry is.
    """
    n = m.n
    for i in range(n):
        for j in range(n):
            if not m.entries[i][j].val_at_least(1 if i > j else 0):
                return False
    for i in range(n):
        if m.entries[i][i].val_at_least(1):
            return False
    return True


def matrix(p: int, rows: Iterable[Iterable]) -> SeriesMatrix:
    """Build an exact matrix from ints, TruncatedSeries, or {exponent: coeff} dicts."""
    def conv(x):
        if isinstance(x, dict):
            return TruncatedSeries.exact(p, x)
        return as_series(x, p)
    return SeriesMatrix(p, [[conv(x) for x in r] for r in rows])
