"""Exact scalar rings.

``QLPoly`` is the ring Z[q^{±1}, λ^{±1}] in which every closed formula lives.
``CycloScalar`` is Q(ζ_p)[λ^{±1}], the target of brute-force character sums.
``specialize`` maps the first ring into the second by sending q to p.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping


def is_prime(p: int) -> bool:
    if not isinstance(p, int) or p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def _check_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p!r} is not a prime")


def _monomial_text(a: int, b: int) -> str:
    parts = []
    if a:
        parts.append("q" if a == 1 else f"q^{a}")
    if b:
        parts.append("lam" if b == 1 else f"lam^{b}")
    return "*".join(parts)


class QLPoly:
    """Integer Laurent polynomial in q and λ, stored as {(a, b): c} for c·q^a·λ^b."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, int], int] | None = None):
        clean = {}
        for (a, b), c in (terms or {}).items():
            c = int(c)
            if c:
                clean[(int(a), int(b))] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def const(cls, c: int) -> QLPoly:
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, a: int = 0, b: int = 0, c: int = 1) -> QLPoly:
        return cls({(a, b): c})

    @classmethod
    def q(cls) -> QLPoly:
        return cls({(1, 0): 1})

    @classmethod
    def lam(cls) -> QLPoly:
        return cls({(0, 1): 1})

    @property
    def terms(self) -> dict[tuple[int, int], int]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def _coerce(self, other) -> QLPoly:
        if isinstance(other, QLPoly):
            return other
        if isinstance(other, int):
            return QLPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return QLPoly(out)

    __radd__ = __add__

    def __neg__(self) -> QLPoly:
        return QLPoly({k: -c for k, c in self._terms.items()})

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
        out: dict[tuple[int, int], int] = {}
        for (a1, b1), c1 in self._terms.items():
            for (a2, b2), c2 in other._terms.items():
                k = (a1 + a2, b1 + b2)
                out[k] = out.get(k, 0) + c1 * c2
        return QLPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> QLPoly:
        if e < 0:
            if len(self._terms) != 1:
                raise ValueError("only monomials ±q^a·λ^b are invertible")
            ((a, b), c), = self._terms.items()
            if c not in (1, -1):
                raise ValueError("only monomials ±q^a·λ^b are invertible")
            return QLPoly({(a * e, b * e): c ** (-e)})
        out = QLPoly.const(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def to_json(self) -> list[list[int]]:
        return [[a, b, c] for (a, b), c in sorted(self._terms.items())]

    @classmethod
    def from_json(cls, data: Iterable[Iterable[int]]) -> QLPoly:
        out: dict[tuple[int, int], int] = {}
        for triple in data:
            a, b, c = (int(x) for x in triple)
            out[(a, b)] = out.get((a, b), 0) + c
        return cls(out)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        # highest λ-power first, then descending q-power
        items = sorted(self._terms.items(), key=lambda kv: (-kv[0][1], -kv[0][0]))
        out = ""
        for i, ((a, b), c) in enumerate(items):
            mono = _monomial_text(a, b)
            mag = abs(c)
            if mono:
                body = mono if mag == 1 else f"{mag}*{mono}"
            else:
                body = str(mag)
            if i == 0:
                out = ("-" if c < 0 else "") + body
            else:
                out += (" - " if c < 0 else " + ") + body
        return out

    def __repr__(self) -> str:
        return f"QLPoly({str(self)!r})"


Q = QLPoly.q()
LAM = QLPoly.lam()
ONE = QLPoly.const(1)
ZERO = QLPoly()


def _fraction(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


class CycloScalar:
    """Laurent polynomial in λ with coefficients in Q(ζ_p).

    A coefficient is a tuple of p-1 rationals: coordinates in the basis
    1, ζ, …, ζ^{p-2}.
    """

    __slots__ = ("p", "_terms", "_hash")

    def __init__(self, p: int, terms: Mapping[int, Iterable] | None = None):
        _check_prime(p)
        self.p = p
        clean: dict[int, tuple[Fraction, ...]] = {}
        for b, vec in (terms or {}).items():
            vec = tuple(_fraction(x) for x in vec)
            if len(vec) != p - 1:
                raise ValueError(f"coefficient needs {p - 1} coordinates, got {len(vec)}")
            if any(vec):
                clean[int(b)] = vec
        self._terms = clean
        self._hash = None

    @classmethod
    def zero(cls, p: int) -> CycloScalar:
        return cls(p)

    @classmethod
    def rational(cls, p: int, x, lam_power: int = 0) -> CycloScalar:
        vec = [Fraction(0)] * (p - 1)
        vec[0] = _fraction(x)
        return cls(p, {lam_power: vec})

    @classmethod
    def one(cls, p: int) -> CycloScalar:
        return cls.rational(p, 1)

    @classmethod
    def zeta(cls, p: int, k: int = 1) -> CycloScalar:
        return cls(p, {0: _reduce_cyclo([Fraction(int(i == k % p)) for i in range(p)])})

    @property
    def terms(self) -> dict[int, tuple[Fraction, ...]]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        """True when no ζ-component is present."""
        return all(not any(vec[1:]) for vec in self._terms.values())

    def _coerce(self, other) -> CycloScalar:
        if isinstance(other, CycloScalar):
            if other.p != self.p:
                raise ValueError(f"cannot mix p={self.p} and p={other.p}")
            return other
        if isinstance(other, (int, Fraction)):
            return CycloScalar.rational(self.p, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for b, vec in other._terms.items():
            if b in out:
                out[b] = tuple(x + y for x, y in zip(out[b], vec))
            else:
                out[b] = vec
        return CycloScalar(self.p, out)

    __radd__ = __add__

    def __neg__(self) -> CycloScalar:
        return CycloScalar(self.p, {b: tuple(-x for x in vec) for b, vec in self._terms.items()})

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
        out: dict[int, list[Fraction]] = {}
        for b1, v1 in self._terms.items():
            for b2, v2 in other._terms.items():
                acc = out.setdefault(b1 + b2, [Fraction(0)] * p)
                for i, x in enumerate(v1):
                    if not x:
                        continue
                    for j, y in enumerate(v2):
                        if y:
                            acc[(i + j) % p] += x * y
        return CycloScalar(p, {b: _reduce_cyclo(vec) for b, vec in out.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        try:
            other = self._coerce(other)
        except ValueError:
            return False
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.p, frozenset(self._terms.items())))
        return self._hash

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "terms": [[b, [f"{x.numerator}/{x.denominator}" for x in vec]]
                      for b, vec in sorted(self._terms.items())],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> CycloScalar:
        p = int(data["p"])
        terms: dict[int, tuple[Fraction, ...]] = {}
        for b, vec in data["terms"]:
            vec = tuple(Fraction(x) for x in vec)
            if int(b) in terms:
                vec = tuple(x + y for x, y in zip(terms[int(b)], vec))
            terms[int(b)] = vec
        return cls(p, terms)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for b, vec in sorted(self._terms.items(), reverse=True):
            coeff = " + ".join(
                (str(x) if i == 0 else f"{x}*z^{i}") for i, x in enumerate(vec) if x
            )
            if sum(1 for x in vec if x) > 1:
                coeff = f"({coeff})"
            if b == 0:
                pieces.append(coeff)
            else:
                lam = "lam" if b == 1 else f"lam^{b}"
                pieces.append(f"{coeff}*{lam}")
        return " + ".join(pieces)

    def __repr__(self) -> str:
        return f"CycloScalar(p={self.p}, {str(self)!r})"


def _reduce_cyclo(vec: list[Fraction]) -> tuple[Fraction, ...]:
    """Reduce a length-p vector in ζ-powers modulo 1 + ζ + … + ζ^{p-1}."""
    top = vec[-1]
    return tuple(x - top for x in vec[:-1])


def specialize(x: QLPoly, p: int) -> CycloScalar:
    """Ring homomorphism q ↦ p, λ ↦ λ."""
    _check_prime(p)
    out: dict[int, list[Fraction]] = {}
    for (a, b), c in x.terms.items():
        vec = out.setdefault(b, [Fraction(0)] * (p - 1))
        vec[0] += c * Fraction(p) ** a
    return CycloScalar(p, out)


def psi_char(x: int, p: int) -> CycloScalar:
    """The additive character ψ(x) = ζ_p^x of F_p."""
    return CycloScalar.zeta(p, x % p)
