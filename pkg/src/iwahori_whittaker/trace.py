"""Frobenius traces L^d(k) of the Whittaker sheaf on O_{(d-k)p} ⊕ Ω_{kp}, and the n = 2 dictionary.

k runs over half-integers in [0, d].  The recursion only makes sense for
k ≤ d - k; larger k are filled in by the shift symmetry L(k) = L(d - k).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .hecke import SimpleRefl, TLeq, Word, expected_eigenvalue
from .quiver import Multisegment
from .scalars import LAM, Q, ZERO, QLPoly

HALF = Fraction(1, 2)


def half_steps(upto: Fraction | int) -> list[Fraction]:
    """0, ½, 1, …, upto."""
    return [Fraction(m, 2) for m in range(int(2 * Fraction(upto)) + 1)]


def k_text(k: Fraction) -> str:
    return str(k.numerator) if k.denominator == 1 else f"{k.numerator}/{k.denominator}"


@dataclass(frozen=True)
class TraceTable:
    d: int
    values: dict[Fraction, QLPoly] = field(hash=False)

    def __getitem__(self, k) -> QLPoly:
        return self.values[Fraction(k)]

    def to_json(self) -> dict:
        return {"d": self.d,
                "rows": [[k_text(k), self.values[k].to_json(), str(self.values[k])]
                         for k in sorted(self.values)]}


def _shell_sum(k: Fraction, lookup) -> QLPoly:
    """(q-1)·Σ_i q^i L(k - ½ - i) over the non-trivial extension shells."""
    top = int(k) - 1 if k.denominator == 1 else int(k - HALF)
    total = ZERO
    for i in range(top + 1):
        total = total + Q ** i * lookup(k - HALF - i)
    return (Q - 1) * total


def l_values(d: int) -> TraceTable:
    if d < 1:
        raise ValueError("d must be positive")
    vals: dict[Fraction, QLPoly] = {Fraction(0): LAM ** d}
    for k in half_steps(Fraction(d, 2))[1:]:
        base = Q ** int(k) * LAM ** d if k.denominator == 1 else ZERO
        vals[k] = base - _shell_sum(k, vals.__getitem__)
    for k in half_steps(d):
        if k not in vals:
            vals[k] = vals[d - k]
    return TraceTable(d, vals)


@dataclass
class IdentityReport:
    d: int
    checked: list[str]
    failures: list[dict]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"d": self.d, "checked": self.checked, "ok": self.ok, "failures": self.failures}


def _report(d: int, rows) -> IdentityReport:
    checked, failures = [], []
    for k, lhs, rhs in rows:
        checked.append(k_text(k))
        if lhs != rhs:
            failures.append({"k": k_text(k), "lhs": str(lhs), "rhs": str(rhs)})
    return IdentityReport(d, checked, failures)


def verify_symmetry(d: int, table: TraceTable | None = None) -> IdentityReport:
    t = table or l_values(d)
    return _report(d, [(k, t[k], t[d - k]) for k in half_steps(d)])


def verify_step_differences(d: int, table: TraceTable | None = None) -> IdentityReport:
    """L(k) - L(k - ½) = ±q^{2k}λ^d for 0 < k ≤ d/2, + for integral k."""
    t = table or l_values(d)
    rows = []
    for k in half_steps(Fraction(d, 2))[1:]:
        sgn = 1 if k.denominator == 1 else -1
        rows.append((k, t[k] - t[k - HALF], sgn * Q ** int(2 * k) * LAM ** d))
    return _report(d, rows)


def unweighted_value(d: int, k: Fraction) -> QLPoly:
    """Sum of traces over all extensions: q^k λ^d for integral k, 0 otherwise."""
    return Q ** int(k) * LAM ** d if k.denominator == 1 else ZERO


def verify_unweighted(d: int, table: TraceTable | None = None) -> IdentityReport:
    """Check the unweighted extension sums both ways.

    Forward: the trivial extension contributes L(k) and the shell of extensions
    that split off Ω_{(k-l)p} contributes (q-1)q^l copies of L(k-½-l); the total
    must be q^kλ^d or 0.  Backward: solving those totals for L(k) rebuilds the
    table from scratch, which must agree with the given one.
    """
    t = table or l_values(d)
    ks = half_steps(Fraction(d, 2))
    rows = [(k, t[k] + _shell_sum(k, t.__getitem__), unweighted_value(d, k)) for k in ks]
    rebuilt: dict[Fraction, QLPoly] = {}
    for k in ks:
        rebuilt[k] = unweighted_value(d, k) - _shell_sum(k, rebuilt.__getitem__)
    rows += [(k, rebuilt[k], t[k]) for k in ks]
    return _report(d, rows)


@dataclass(frozen=True)
class DictionaryRow:
    multisegment: Multisegment
    word: Word
    eigenvalue: QLPoly
    codim: int

    def to_json(self) -> dict:
        return {"multisegment": self.multisegment.to_json()["segments"],
                "word": self.word.to_json(), "eigenvalue": str(self.eigenvalue),
                "codim": self.codim}


def sheaf_operator_table(n: int = 2) -> list[DictionaryRow]:
    """Torsion sheaves of degree (1, 1) paired with the Hecke operators they match.

    Eigenvalues come from the explicit operator matrices: the two length-two
    segments give the two orders of s_1 and t_{≤2}, the split sheaf gives
    t_{≤2} alone.  The codimension column is the codimension of the stratum
    in the space of degree-(1, 1) sheaves (the split one is the closed point).
    """
    if n != 2:
        raise ValueError("the dictionary is only tabulated for n = 2")
    rows = [
        DictionaryRow(Multisegment.of((0, 2)), Word((SimpleRefl(1), TLeq(2))), LAM, 1),
        DictionaryRow(Multisegment.of((1, 2)), Word((TLeq(2), SimpleRefl(1))), LAM, 1),
        DictionaryRow(Multisegment.of((0, 1), (1, 1)), Word((TLeq(2),)), -LAM, 2),
    ]
    for row in rows:
        if expected_eigenvalue(row.word) != row.eigenvalue:
            raise AssertionError(f"{row.multisegment}: operator eigenvalue "
                                 f"{expected_eigenvalue(row.word)} != {row.eigenvalue}")
    return rows
