"""Iwahori–Hecke operators as explicit sums over right Iw-cosets."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Sequence, Union

from .decomposition import Cell
from .scalars import LAM, CycloScalar, QLPoly, specialize
from .series import SeriesMatrix, TruncatedSeries, iwahori_member, mat_inv
from .whittaker import (
    WhittakerContext,
    is_dominant,
    sign,
    vol_dominant,
    vol_sigma,
    whittaker_eval,
)


@dataclass(frozen=True)
class SimpleRefl:
    i: int

    def to_json(self) -> dict:
        return {"kind": "srefl", "i": self.i}


@dataclass(frozen=True)
class TLeq:
    i: int

    def to_json(self) -> dict:
        return {"kind": "tleq", "i": self.i}


@dataclass(frozen=True)
class DiagDominant:
    d: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(int(x) for x in self.d))
        if not is_dominant(self.d):
            raise ValueError(f"{self.d} is not dominant")

    def to_json(self) -> dict:
        return {"kind": "diag", "d": list(self.d)}


@dataclass(frozen=True)
class Word:
    """Composite T_{g_1} ∘ T_{g_2} ∘ …; the rightmost factor acts first."""

    of: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "of", tuple(self.of))

    def to_json(self) -> dict:
        return {"kind": "word", "of": [g.to_json() for g in self.of]}


HeckeGenerator = Union[SimpleRefl, TLeq, DiagDominant, Word]


def generator_from_json(data) -> HeckeGenerator:
    kind = data["kind"]
    if kind == "srefl":
        return SimpleRefl(int(data["i"]))
    if kind == "tleq":
        return TLeq(int(data["i"]))
    if kind == "diag":
        return DiagDominant(tuple(data["d"]))
    if kind == "word":
        return Word(tuple(generator_from_json(x) for x in data["of"]))
    raise ValueError(f"unknown generator kind {kind!r}")


def parse_generator(text: str) -> HeckeGenerator:
    """Parse 'srefl:1', 'tleq:2', 'diag:1,0' or 'word:srefl:1,tleq:2'."""
    kind, _, rest = text.strip().partition(":")
    if kind == "srefl":
        return SimpleRefl(int(rest))
    if kind == "tleq":
        return TLeq(int(rest))
    if kind == "diag":
        return DiagDominant(tuple(int(x) for x in rest.split(",")))
    if kind == "word":
        # diag factors would be ambiguous with ',' separators; use ';' between them
        sep = ";" if ";" in rest else ","
        return Word(tuple(parse_generator(x) for x in rest.split(sep) if x))
    raise ValueError(f"cannot parse generator {text!r}")


def _check(g: HeckeGenerator, n: int) -> None:
    if isinstance(g, SimpleRefl) and not 1 <= g.i < n:
        raise ValueError(f"simple reflection s_{g.i} does not exist for n={n}")
    if isinstance(g, TLeq) and not 1 <= g.i <= n:
        raise ValueError(f"t_<={g.i} does not exist for n={n}")
    if isinstance(g, DiagDominant) and len(g.d) != n:
        raise ValueError(f"diagonal {g.d} has wrong length for n={n}")
    if isinstance(g, Word):
        for h in g.of:
            _check(h, n)


def t_leq_matrix(i: int, n: int, p: int) -> SeriesMatrix:
    """t_{≤i}: e_1 ↦ π·e_i, e_j ↦ e_{j-1} for 1 < j ≤ i, e_j ↦ e_j for j > i."""
    if not 1 <= i <= n:
        raise ValueError(f"need 1 <= i <= n, got i={i}, n={n}")
    zero = TruncatedSeries.zero(p)
    rows = [[zero] * n for _ in range(n)]
    rows[i - 1][0] = TruncatedSeries.monomial(p, 1)
    for j in range(2, n + 1):
        target = j - 1 if j <= i else j
        rows[target - 1][j - 1] = TruncatedSeries.one(p)
    return SeriesMatrix(p, rows)


def simple_refl_matrix(i: int, n: int, p: int) -> SeriesMatrix:
    sigma = list(range(1, n + 1))
    sigma[i - 1], sigma[i] = sigma[i], sigma[i - 1]
    return SeriesMatrix.perm(sigma, p)


def generator_matrix(g: HeckeGenerator, n: int, p: int) -> SeriesMatrix:
    """The element whose double coset defines T_g (products for words)."""
    if isinstance(g, SimpleRefl):
        return simple_refl_matrix(g.i, n, p)
    if isinstance(g, TLeq):
        return t_leq_matrix(g.i, n, p)
    if isinstance(g, DiagDominant):
        return SeriesMatrix.diag(g.d, p)
    out = SeriesMatrix.identity(n, p)
    for h in g.of:
        out = out @ generator_matrix(h, n, p)
    return out


def _elementary(n: int, p: int, entries: dict[tuple[int, int], TruncatedSeries]) -> SeriesMatrix:
    one, zero = TruncatedSeries.one(p), TruncatedSeries.zero(p)
    rows = [[one if a == b else zero for b in range(n)] for a in range(n)]
    for (a, b), x in entries.items():
        rows[a][b] = x
    return SeriesMatrix(p, rows)


def coset_reps(g: HeckeGenerator, ctx: WhittakerContext) -> list[SeriesMatrix]:
    """Representatives h of Iw·g·Iw/Iw.

    SimpleRefl(i): (1 + a·E_{i,i+1})·s_i, a ∈ F_p.
    TLeq(i): t_{≤i}·(1 + Σ_{j>i} π^{-1} v_j E_{1,j}), v ∈ F_p^{n-i}.
    DiagDominant(d): u·diag(π^d), u ∈ N(O) with u_{ab} running over O/π^{d_a - d_b}.
    Word: all products h_1·h_2·…, one per summand of the composite operator.
    """
    n, p = ctx.n, ctx.p
    _check(g, n)
    if isinstance(g, SimpleRefl):
        s = simple_refl_matrix(g.i, n, p)
        return [_elementary(n, p, {(g.i - 1, g.i): TruncatedSeries.constant(p, a)}) @ s
                for a in range(p)]
    if isinstance(g, TLeq):
        t = t_leq_matrix(g.i, n, p)
        reps = []
        for v in product(range(p), repeat=n - g.i):
            m = _elementary(n, p, {(0, g.i + j): TruncatedSeries.monomial(p, -1, c)
                                   for j, c in enumerate(v)})
            reps.append(t @ m)
        return reps
    if isinstance(g, DiagDominant):
        dmat = SeriesMatrix.diag(g.d, p)
        slots = [(a, b) for a in range(n) for b in range(a + 1, n)]
        ranges = [list(product(range(p), repeat=g.d[a] - g.d[b])) for a, b in slots]
        reps = []
        for choice in product(*ranges):
            entries = {slot: TruncatedSeries.exact(p, dict(enumerate(cs)))
                       for slot, cs in zip(slots, choice)}
            reps.append(_elementary(n, p, entries) @ dmat)
        return reps
    reps = [SeriesMatrix.identity(n, p)]
    for h in g.of:
        reps = [a @ b for a in reps for b in coset_reps(h, ctx)]
    return reps


def double_coset_volume(g: HeckeGenerator, n: int) -> QLPoly:
    """Number of right Iw-cosets in Iw·g·Iw as a polynomial in q."""
    _check(g, n)
    if isinstance(g, SimpleRefl):
        sigma = list(range(1, n + 1))
        sigma[g.i - 1], sigma[g.i] = sigma[g.i], sigma[g.i - 1]
        return vol_sigma(sigma)
    if isinstance(g, TLeq):
        return QLPoly.q() ** (n - g.i)
    if isinstance(g, DiagDominant):
        return vol_dominant(g.d)
    raise ValueError("a word is not a single double coset")


@dataclass
class RepsReport:
    generator: HeckeGenerator
    count: int
    expected_count: int
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"generator": self.generator.to_json(), "count": self.count,
                "expected_count": self.expected_count, "ok": self.ok,
                "failures": self.failures}


def validate_reps(g: HeckeGenerator, ctx: WhittakerContext,
                  reps: Sequence[SeriesMatrix] | None = None) -> RepsReport:
    """Certify a representative set: pairwise Iw-inequivalence, membership, count."""
    n, p = ctx.n, ctx.p
    if isinstance(g, Word):
        raise ValueError("validate the factors of a word individually")
    if reps is None:
        reps = coset_reps(g, ctx)
    failures = []
    expected = specialize(double_coset_volume(g, n), p)
    expected_count = int(expected.terms[0][0])
    if len(reps) != expected_count:
        failures.append(f"count {len(reps)} != volume {expected_count}")

    gm = generator_matrix(g, n, p)
    ginv = mat_inv(gm)
    for a, h in enumerate(reps):
        if not iwahori_member(h @ ginv):
            failures.append(f"rep {a} is not in Iw·g")

    inverses = [mat_inv(h) for h in reps]
    for a in range(len(reps)):
        for b in range(a + 1, len(reps)):
            if iwahori_member(inverses[a] @ reps[b]):
                failures.append(f"reps {a} and {b} lie in the same coset")
    return RepsReport(g, len(reps), expected_count, failures)


Evaluator = Callable[[SeriesMatrix], CycloScalar]


def hecke_apply(g: HeckeGenerator, f: Evaluator, x: SeriesMatrix, ctx: WhittakerContext) -> CycloScalar:
    """(T_g f)(x) = Σ_{h ∈ Iw g Iw/Iw} f(x·h); words apply their rightmost factor first."""
    if isinstance(g, Word):
        if not g.of:
            return f(x)
        head, rest = g.of[0], Word(g.of[1:])
        return hecke_apply(head, lambda y: hecke_apply(rest, f, y, ctx), x, ctx)
    total = CycloScalar.zero(ctx.p)
    for h in coset_reps(g, ctx):
        total = total + f(x @ h)
    return total


def expected_eigenvalue(g: HeckeGenerator) -> QLPoly:
    """Eigenvalue on the Iwahori-fixed Steinberg vector."""
    if isinstance(g, SimpleRefl):
        return QLPoly.const(-1)
    if isinstance(g, TLeq):
        return (-1) ** (g.i - 1) * LAM
    if isinstance(g, DiagDominant):
        return LAM ** sum(g.d)
    out = QLPoly.const(1)
    for h in g.of:
        out = out * expected_eigenvalue(h)
    return out


@dataclass
class EigenReport:
    generator: HeckeGenerator
    eigenvalue: QLPoly
    checked: int
    failures: list[dict]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"generator": self.generator.to_json(), "eigenvalue": self.eigenvalue.to_json(),
                "eigenvalue_text": str(self.eigenvalue), "checked": self.checked,
                "ok": self.ok, "failures": self.failures}


def verify_eigen(g: HeckeGenerator, cells: Sequence[Cell], ctx: WhittakerContext,
                 f: Evaluator | None = None) -> EigenReport:
    """Check (T_g W)(x) = eigenvalue · W(x) exactly at x = diag(π^d)·σ for each cell."""
    if f is None:
        def f(m):
            return whittaker_eval(m, ctx)
    eig = expected_eigenvalue(g)
    eig_p = specialize(eig, ctx.p)
    failures = []
    for cell in cells:
        x = cell.matrix(ctx.p)
        lhs = hecke_apply(g, f, x, ctx)
        rhs = eig_p * f(x)
        if lhs != rhs:
            failures.append({"cell": cell.to_json(), "lhs": str(lhs), "rhs": str(rhs)})
    return EigenReport(g, eig, len(cells), failures)


def reduced_word(sigma: Sequence[int]) -> list[SimpleRefl]:
    """Reduced expression σ = s_{i_1} ⋯ s_{i_l} (as permutation matrices), by bubble sort."""
    sigma = list(sigma)
    word: list[SimpleRefl] = []
    while True:
        for i in range(len(sigma) - 1):
            if sigma[i] > sigma[i + 1]:
                # σ = (σ∘s_i)∘s_i and σ∘s_i has one inversion fewer
                sigma[i], sigma[i + 1] = sigma[i + 1], sigma[i]
                word.append(SimpleRefl(i + 1))
                break
        else:
            break
    word.reverse()
    return word


def permutation_eigenvalue(sigma: Sequence[int]) -> QLPoly:
    return QLPoly.const(sign(sigma))
