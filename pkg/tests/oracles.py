"""Independent reference computations, kept free of the package under test.

Polynomials in q, λ are plain dicts {(q_exp, lam_exp): int}.  Running this
file rewrites golden/derived.json; the tests compare the package against
that frozen file, and test_golden.py checks the oracles still reproduce it.
"""

from __future__ import annotations

import cmath
import itertools
import json
from fractions import Fraction
from pathlib import Path

import numpy as np

GOLDEN = Path(__file__).parent / "golden" / "derived.json"


def poly_add(a: dict, b: dict, scale: int = 1) -> dict:
    out = dict(a)
    for k, c in b.items():
        out[k] = out.get(k, 0) + scale * c
        if out[k] == 0:
            del out[k]
    return out


def poly_triples(a: dict) -> list[list[int]]:
    return [[qe, le, c] for (qe, le), c in sorted(a.items())]


# trace recursion: L(k) = λ^d Σ_{m=0}^{2k} (-q)^m for k ≤ d/2, obtained by
# telescoping L(k) - L(k-½) = ±q^{2k}λ^d from L(0) = λ^d


def trace_closed_form(d: int, k: Fraction) -> dict:
    k = Fraction(k)
    if k > Fraction(d, 2):
        k = d - k
    return {(m, d): (-1) ** m for m in range(int(2 * k) + 1)}


def step_difference(d: int, k: Fraction) -> dict:
    return poly_add(trace_closed_form(d, k), trace_closed_form(d, k - Fraction(1, 2)), -1)


def shell_total(d: int, k: Fraction) -> dict:
    """L(k) + (q-1)Σ q^i L(k-½-i) from the closed form, expanded by hand."""
    k = Fraction(k)
    total = trace_closed_form(d, k)
    top = int(k) - 1 if k.denominator == 1 else int(k - Fraction(1, 2))
    for i in range(top + 1):
        inner = trace_closed_form(d, k - Fraction(1, 2) - i)
        for (qe, le), c in inner.items():
            total = poly_add(total, {(qe + i + 1, le): c})
            total = poly_add(total, {(qe + i, le): -c})
    return total


# GL_2 values.  The diagonal column is the published table; the antidiagonal
# column is derived from T_s W = -W evaluated at diag(π^{d1}, π^{d2}) with
# d1 ≥ d2: the p translates (1 + aπ^{d1-d2}E_12) have no residue, so
# p·W(antidiag) = -W(diag).


def gl2_diagonal(d1: int, d2: int) -> dict:
    return {(d2 - d1, d1 + d2): 1} if d1 >= d2 else {}


def gl2_antidiagonal_from_eigen(d1: int, d2: int) -> dict:
    if d1 < d2:
        raise ValueError("relation only informative for d1 ≥ d2")
    return {(qe - 1, le): -c for (qe, le), c in gl2_diagonal(d1, d2).items()}


def cyclo_numeric(terms: dict[int, tuple[Fraction, ...]], p: int, lam: complex) -> complex:
    """Evaluate Σ_b (Σ_k c_k ζ^k) λ^b at ζ = e^{2πi/p}."""
    zeta = cmath.exp(2j * cmath.pi / p)
    return sum(sum(float(c) * zeta ** k for k, c in enumerate(vec)) * lam ** b
               for b, vec in terms.items())


# cyclic quiver brute force over tiny fields


def all_reps(n: int, p: int, dims: tuple[int, ...]):
    shapes = [(dims[(k + 1) % n], dims[k]) for k in range(n)]
    sizes = [a * b for a, b in shapes]
    for flat in itertools.product(range(p), repeat=sum(sizes)):
        maps, off = [], 0
        for (a, b), s in zip(shapes, sizes):
            maps.append(np.array(flat[off:off + s], dtype=np.int64).reshape(a, b))
            off += s
        yield maps


def is_nilpotent(n: int, p: int, dims, maps) -> bool:
    c = np.eye(dims[0], dtype=np.int64)
    for k in range(n):
        c = (maps[k] @ c) % p
    m = np.eye(dims[0], dtype=np.int64)
    for _ in range(max(dims[0], 1)):
        m = (c @ m) % p
    # nilpotency at node 0 controls every node: around-the-cycle composites
    # at different nodes share their nonzero eigenvalues
    return not m.any()


def _det_nonzero_mod(m: np.ndarray, p: int) -> bool:
    n = m.shape[0]
    a = [list(map(int, r)) for r in m]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] % p), None)
        if piv is None:
            return False
        a[c], a[piv] = a[piv], a[c]
        inv = pow(a[c][c], -1, p)
        for r in range(c + 1, n):
            f = a[r][c] * inv % p
            a[r] = [(x - f * y) % p for x, y in zip(a[r], a[c])]
    return True


def general_linear(d: int, p: int) -> list[np.ndarray]:
    out = []
    for flat in itertools.product(range(p), repeat=d * d):
        m = np.array(flat, dtype=np.int64).reshape(d, d)
        if _det_nonzero_mod(m, p):
            out.append(m)
    return out


def _inv_mod(m: np.ndarray, p: int) -> np.ndarray:
    d = m.shape[0]
    for cand in itertools.product(range(p), repeat=d * d):
        c = np.array(cand, dtype=np.int64).reshape(d, d)
        if np.array_equal((m @ c) % p, np.eye(d, dtype=np.int64)):
            return c
    raise ValueError("singular")


def orbits(n: int, p: int, dims: tuple[int, ...]) -> list[list[tuple]]:
    """Isomorphism classes of nilpotent reps, by brute-force group action."""
    keyed = {}
    for maps in all_reps(n, p, dims):
        if is_nilpotent(n, p, dims, maps):
            keyed[tuple(m.tobytes() for m in maps)] = maps
    groups = [general_linear(d, p) for d in dims]
    inverses = [[_inv_mod(g, p) for g in gs] for gs in groups]
    seen, out = set(), []
    for key, maps in keyed.items():
        if key in seen:
            continue
        orbit = set()
        for choice in itertools.product(*[range(len(gs)) for gs in groups]):
            g = [groups[j][c] for j, c in enumerate(choice)]
            gi = [inverses[j][c] for j, c in enumerate(choice)]
            new = tuple(((g[(k + 1) % n] @ maps[k] @ gi[k]) % p).tobytes() for k in range(n))
            orbit.add(new)
        seen |= orbit
        out.append(sorted(orbit))
    return out


def brute_hom_count(n: int, p: int, xd, xm, yd, ym) -> int:
    """Number of intertwiners x → y, by enumerating every node-wise matrix tuple."""
    shapes = [(yd[i], xd[i]) for i in range(n)]
    sizes = [a * b for a, b in shapes]
    count = 0
    for flat in itertools.product(range(p), repeat=sum(sizes)):
        f, off = [], 0
        for (a, b), s in zip(shapes, sizes):
            f.append(np.array(flat[off:off + s], dtype=np.int64).reshape(a, b))
            off += s
        if all(np.array_equal((f[(k + 1) % n] @ xm[k]) % p, (ym[k] @ f[k]) % p)
               for k in range(n)):
            count += 1
    return count


def segment_rep(n: int, segs: list[tuple[int, int]]):
    """Block form of a multisegment, written out independently of the package."""
    dims = [0] * n
    slots = []
    for start, length in sorted(segs):
        chain = []
        for t in range(length):
            node = (start + t) % n
            chain.append((node, dims[node]))
            dims[node] += 1
        slots.append(chain)
    maps = [np.zeros((dims[(k + 1) % n], dims[k]), dtype=np.int64) for k in range(n)]
    for chain in slots:
        for (node, col), (_, row) in zip(chain, chain[1:]):
            maps[node][row, col] = 1
    return tuple(dims), maps


def freeze() -> dict:
    from fractions import Fraction as F
    out = {
        "trace_d1": {str(k): poly_triples(trace_closed_form(1, k)) for k in (F(0), F(1, 2), F(1))},
        "trace_d2_k1": poly_triples(trace_closed_form(2, F(1))),
        "step_d1_half": poly_triples(step_difference(1, F(1, 2))),
        "step_d2_1": poly_triples(step_difference(2, F(1))),
        "step_d2_half": poly_triples(step_difference(2, F(1, 2))),
        "antidiagonal_00": poly_triples(gl2_antidiagonal_from_eigen(0, 0)),
        "antidiagonal": {f"{d1},{d2}": poly_triples(gl2_antidiagonal_from_eigen(d1, d2))
                         for d1 in range(-2, 3) for d2 in range(-2, 3) if d1 >= d2},
        "diagonal": {f"{d1},{d2}": poly_triples(gl2_diagonal(d1, d2))
                     for d1 in range(-2, 3) for d2 in range(-2, 3)},
        "orbit_counts_p2": {},
    }
    for n in (1, 2, 3):
        for total in range(1, 4):
            for dims in itertools.product(range(total + 1), repeat=n):
                if sum(dims) == total:
                    out["orbit_counts_p2"][f"{n}:{','.join(map(str, dims))}"] = len(orbits(n, 2, dims))
    # hom between the two simples of the 2-cycle and from a simple to itself
    s0 = segment_rep(2, [(0, 1)])
    s1 = segment_rep(2, [(1, 1)])
    out["hom_count_s0_s0_p3"] = brute_hom_count(2, 3, *s0, *s0)
    out["hom_count_s1_s0_p3"] = brute_hom_count(2, 3, *s1, *s0)
    return out


if __name__ == "__main__":
    GOLDEN.parent.mkdir(exist_ok=True)
    GOLDEN.write_text(json.dumps(freeze(), indent=1, sort_keys=True) + "\n")
    print(f"wrote {GOLDEN}")
