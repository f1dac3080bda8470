"""Parabolic torsion sheaves at one point as nilpotent cyclic-quiver representations.

Nodes are 0..n-1 and ``maps[k]`` is the arrow φ_{k+1}: V_k → V_{k+1 mod n},
a dims[k+1] × dims[k] matrix over F_p.  The composite once around the cycle
is multiplication by the local coordinate, so support at the marked point
means that composite is nilpotent.

Segment(j, k) is the indecomposable with one basis vector at each of the
nodes j, j+1, …, j+k-1 (mod n), consecutive arrows mapping each vector to
the next and the last one to 0.  With n = 2 the three sheaves of total
degree (1, 1) supported at the point are

    T0 --id--> T1 --0--> T0(p)   = {Segment(0, 2)}
    T0 --0--> T1 --id--> T0(p)   = {Segment(1, 2)}
    T0 --0--> T1 --0--> T0(p)    = {Segment(0, 1), Segment(1, 1)}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from . import gfp
from .scalars import is_prime


class InvalidRepresentation(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Segment:
    start: int
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("segment length must be positive")
        if self.start < 0:
            raise ValueError("segment start must be a node index")

    def nodes(self, n: int) -> list[int]:
        return [(self.start + t) % n for t in range(self.length)]


@dataclass(frozen=True)
class Multisegment:
    segments: tuple[Segment, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(sorted(self.segments)))

    @classmethod
    def of(cls, *pairs: tuple[int, int]) -> Multisegment:
        return cls(tuple(Segment(s, k) for s, k in pairs))

    def dims(self, n: int) -> tuple[int, ...]:
        out = [0] * n
        for seg in self.segments:
            for node in seg.nodes(n):
                out[node] += 1
        return tuple(out)

    def to_json(self) -> dict:
        return {"segments": [[s.start, s.length] for s in self.segments]}

    @classmethod
    def from_json(cls, data) -> Multisegment:
        return cls(tuple(Segment(int(s), int(k)) for s, k in data["segments"]))

    def __str__(self) -> str:
        return "{" + ", ".join(f"Seg({s.start},{s.length})" for s in self.segments) + "}"


class QuiverRep:
    __slots__ = ("n", "p", "dims", "maps")

    def __init__(self, n: int, p: int, dims: Sequence[int], maps: Sequence | None = None):
        if n < 1:
            raise InvalidRepresentation("need at least one node")
        if not is_prime(p):
            raise InvalidRepresentation(f"{p} is not a prime")
        dims = tuple(int(d) for d in dims)
        if len(dims) != n or any(d < 0 for d in dims):
            raise InvalidRepresentation(f"dimension vector {dims} does not fit {n} nodes")
        if maps is None:
            maps = [np.zeros((dims[(k + 1) % n], dims[k]), dtype=np.int64) for k in range(n)]
        if len(maps) != n:
            raise InvalidRepresentation(f"expected {n} maps, got {len(maps)}")
        clean = []
        for k, m in enumerate(maps):
            shape = (dims[(k + 1) % n], dims[k])
            arr = np.array(m, dtype=np.int64)
            if arr.size == 0:
                arr = np.zeros(shape, dtype=np.int64)
            if arr.shape != shape:
                raise InvalidRepresentation(
                    f"phi_{k + 1}: V_{k} -> V_{(k + 1) % n} must be {shape[0]}x{shape[1]}, got {arr.shape}")
            clean.append(arr % p)
        self.n, self.p, self.dims = n, p, dims
        self.maps = tuple(clean)

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def composite(self, j: int, steps: int) -> np.ndarray:
        """φ_{j+steps} ∘ … ∘ φ_{j+1}: V_j → V_{j+steps}."""
        j %= self.n
        m = np.eye(self.dims[j], dtype=np.int64)
        for t in range(steps):
            m = gfp.matmul(self.maps[(j + t) % self.n], m, self.p)
        return m

    def to_json(self) -> dict:
        return {"n": self.n, "p": self.p, "dims": list(self.dims),
                "maps": [m.tolist() for m in self.maps]}

    @classmethod
    def from_json(cls, data) -> QuiverRep:
        try:
            return cls(int(data["n"]), int(data["p"]), data["dims"], data["maps"])
        except (KeyError, TypeError) as exc:
            raise InvalidRepresentation(f"malformed representation: {exc}") from exc

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuiverRep):
            return NotImplemented
        return (self.n, self.p, self.dims) == (other.n, other.p, other.dims) and all(
            np.array_equal(a, b) for a, b in zip(self.maps, other.maps))

    def __repr__(self) -> str:
        return f"QuiverRep({json.dumps(self.to_json())})"


def validation_errors(r: QuiverRep, relaxed: bool = False) -> list[str]:
    """Reasons r is not a torsion sheaf supported at the marked point (empty when valid).

    Shapes are enforced by the constructor; ``relaxed`` drops nilpotency.
    """
    if relaxed:
        return []
    errors = []
    for j in range(r.n):
        c = r.composite(j, r.n)
        power = np.eye(r.dims[j], dtype=np.int64)
        for _ in range(r.dims[j]):
            power = gfp.matmul(c, power, r.p)
        if power.any():
            errors.append(f"composite around the cycle at node {j} is not nilpotent")
    return errors


def validate(r: QuiverRep, relaxed: bool = False) -> bool:
    return not validation_errors(r, relaxed)


def cycle_rank(r: QuiverRep, i: int, steps: int) -> int:
    if steps < 0:
        raise ValueError("steps must be non-negative")
    if steps == 0:
        return r.dims[i % r.n]
    return gfp.rank(r.composite(i, steps), r.p)


def rank_invariants(r: QuiverRep, max_steps: int | None = None) -> tuple[tuple[int, ...], ...]:
    top = r.total_dim if max_steps is None else max_steps
    return tuple(tuple(cycle_rank(r, i, s) for s in range(top + 1)) for i in range(r.n))


def _layout(ms: Multisegment, n: int) -> dict[tuple[int, int], tuple[int, int]]:
    """(segment index, position) -> (node, column index at that node)."""
    counts = [0] * n
    out = {}
    for s, seg in enumerate(ms.segments):
        for t, node in enumerate(seg.nodes(n)):
            out[(s, t)] = (node, counts[node])
            counts[node] += 1
    return out


def build_from_multisegment(ms: Multisegment, n: int, p: int) -> QuiverRep:
    dims = ms.dims(n)
    maps = [np.zeros((dims[(k + 1) % n], dims[k]), dtype=np.int64) for k in range(n)]
    lay = _layout(ms, n)
    for s, seg in enumerate(ms.segments):
        for t in range(seg.length - 1):
            node, col = lay[(s, t)]
            _, row = lay[(s, t + 1)]
            maps[node][row, col] = 1
    return QuiverRep(n, p, dims, maps)


def direct_sum(x: QuiverRep, y: QuiverRep) -> QuiverRep:
    if (x.n, x.p) != (y.n, y.p):
        raise ValueError("direct sum needs the same quiver and field")
    n = x.n
    dims = tuple(a + b for a, b in zip(x.dims, y.dims))
    maps = []
    for k in range(n):
        m = np.zeros((dims[(k + 1) % n], dims[k]), dtype=np.int64)
        m[:x.dims[(k + 1) % n], :x.dims[k]] = x.maps[k]
        m[x.dims[(k + 1) % n]:, x.dims[k]:] = y.maps[k]
        maps.append(m)
    return QuiverRep(n, x.p, dims, maps)


def conjugate(r: QuiverRep, g: Sequence[np.ndarray]) -> QuiverRep:
    """Change of basis (g_0, …, g_{n-1}) acting by φ_k ↦ g_k φ_k g_{k-1}^{-1}."""
    n, p = r.n, r.p
    inv = [gfp.inverse(m, p) for m in g]
    maps = [gfp.matmul(gfp.matmul(g[(k + 1) % n], r.maps[k], p), inv[k], p) for k in range(n)]
    return QuiverRep(n, p, r.dims, maps)


@dataclass(frozen=True)
class Decomposed:
    multisegment: Multisegment
    certificate: tuple[np.ndarray, ...]

    def to_json(self) -> dict:
        out = self.multisegment.to_json()
        out["certificate"] = [m.tolist() for m in self.certificate]
        return out


def verify_certificate(r: QuiverRep, ms: Multisegment, cert: Sequence[np.ndarray]) -> bool:
    """Each cert[j] is invertible and φ_k·cert[k] = cert[k+1]·canon_k for every arrow."""
    canon = build_from_multisegment(ms, r.n, r.p)
    if canon.dims != r.dims:
        return False
    for j in range(r.n):
        if cert[j].shape != (r.dims[j], r.dims[j]) or not gfp.is_invertible(cert[j], r.p):
            return False
    for k in range(r.n):
        lhs = gfp.matmul(r.maps[k], cert[k], r.p)
        rhs = gfp.matmul(cert[(k + 1) % r.n], canon.maps[k], r.p)
        if not np.array_equal(lhs, rhs):
            return False
    return True


def decompose(r: QuiverRep) -> Decomposed:
    """Split r into segments, longest first, with a node-wise change of basis.

    For each length L (descending) and node j, segment tops are chosen as a
    complement of (ker Φ^{L-1} + Φ ker Φ^{L+1}) ∩ V_j inside ker Φ^L ∩ V_j,
    where Φ is the total arrow operator; the chains b, Φb, …, Φ^{L-1}b of all
    tops form a homogeneous basis.
    """
    errors = validation_errors(r)
    if errors:
        raise InvalidRepresentation("; ".join(errors))
    n, p, N = r.n, r.p, r.total_dim
    kernels = {(j, L): gfp.nullspace(r.composite(j, L), p)
               for j in range(n) for L in range(N + 2)}

    chains: list[tuple[Segment, list[np.ndarray]]] = []
    for L in range(N, 0, -1):
        for j in range(n):
            lower = kernels[(j, L - 1)]
            pushed = gfp.matmul(r.maps[(j - 1) % n], kernels[((j - 1) % n, L + 1)], p)
            base = np.hstack([lower, pushed])
            tops = gfp.extend_basis(base, kernels[(j, L)], p)
            for c in range(tops.shape[1]):
                b = tops[:, c:c + 1]
                vecs = [gfp.matmul(r.composite(j, t), b, p) for t in range(L)]
                chains.append((Segment(j, L), vecs))

    chains.sort(key=lambda sc: sc[0])
    ms = Multisegment(tuple(seg for seg, _ in chains))
    cols: list[list[np.ndarray]] = [[] for _ in range(n)]
    for seg, vecs in chains:
        for t, node in enumerate(seg.nodes(n)):
            cols[node].append(vecs[t])
    cert = tuple(np.hstack(c) if c else np.zeros((r.dims[j], 0), dtype=np.int64)
                 for j, c in enumerate(cols))
    if not verify_certificate(r, ms, cert):
        raise RuntimeError("decomposition certificate failed to verify")
    return Decomposed(ms, cert)


def enumerate_classes(dims: Sequence[int], n: int) -> list[Multisegment]:
    """All multisegments with the given dimension vector."""
    dims = tuple(dims)
    if len(dims) != n:
        raise ValueError("dimension vector length differs from n")
    total = sum(dims)
    candidates = [Segment(j, k) for j in range(n) for k in range(1, total + 1)]
    out: list[Multisegment] = []

    def rec(start: int, remaining: list[int], chosen: list[Segment]):
        if not any(remaining):
            out.append(Multisegment(tuple(chosen)))
            return
        for idx in range(start, len(candidates)):
            seg = candidates[idx]
            nodes = seg.nodes(n)
            trial = list(remaining)
            for node in nodes:
                trial[node] -= 1
            if min(trial) < 0:
                continue
            rec(idx, trial, chosen + [seg])

    rec(0, list(dims), [])
    return sorted(set(out), key=lambda m: [(s.start, s.length) for s in m.segments])


def hom_ext_matrix(x: QuiverRep, y: QuiverRep) -> np.ndarray:
    """Matrix of ⊕_i Hom(X_i, Y_i) → ⊕_k Hom(X_k, Y_{k+1}), (f_i) ↦ (f_{k+1}φ^X_k − φ^Y_k f_k)."""
    if (x.n, x.p) != (y.n, y.p):
        raise ValueError("hom/ext need the same quiver and field")
    n, p = x.n, x.p
    src_blocks = [(i, y.dims[i], x.dims[i]) for i in range(n)]
    dst_blocks = [(k, y.dims[(k + 1) % n], x.dims[k]) for k in range(n)]
    src_off = np.cumsum([0] + [a * b for _, a, b in src_blocks])
    dst_off = np.cumsum([0] + [a * b for _, a, b in dst_blocks])
    mat = np.zeros((dst_off[-1], src_off[-1]), dtype=np.int64)
    for i, yi, xi in src_blocks:
        for a in range(yi):
            for b in range(xi):
                col = src_off[i] + a * xi + b
                f = np.zeros((yi, xi), dtype=np.int64)
                f[a, b] = 1
                # f_i appears in arrow k = i-1 (as f_{k+1}) and arrow k = i (as f_k)
                k_in = (i - 1) % n
                img = gfp.matmul(f, x.maps[k_in], p)
                mat[dst_off[k_in]:dst_off[k_in + 1], col] += img.reshape(-1)
                img = gfp.matmul(y.maps[i], f, p)
                mat[dst_off[i]:dst_off[i + 1], col] -= img.reshape(-1)
    return mat % p


def hom_dim(x: QuiverRep, y: QuiverRep) -> int:
    m = hom_ext_matrix(x, y)
    return m.shape[1] - gfp.rank(m, x.p)


def ext1_dim(x: QuiverRep, y: QuiverRep) -> int:
    """Ext¹ is the cokernel of the two-term complex; there is no Ext² to compute."""
    m = hom_ext_matrix(x, y)
    return m.shape[0] - gfp.rank(m, x.p)


def euler_form(xdims: Sequence[int], ydims: Sequence[int]) -> int:
    n = len(xdims)
    return sum(xdims[i] * (ydims[i] - ydims[(i + 1) % n]) for i in range(n))


def homomorphisms(x: QuiverRep, y: QuiverRep) -> list[tuple[np.ndarray, ...]]:
    """Basis of Hom(x, y) as node-wise matrix tuples."""
    n = x.n
    basis = gfp.nullspace(hom_ext_matrix(x, y), x.p)
    out = []
    for c in range(basis.shape[1]):
        v, off, f = basis[:, c], 0, []
        for i in range(n):
            size = y.dims[i] * x.dims[i]
            f.append(v[off:off + size].reshape(y.dims[i], x.dims[i]))
            off += size
        out.append(tuple(f))
    return out


def find_isomorphism(x: QuiverRep, y: QuiverRep, limit: int = 1 << 16) -> tuple[np.ndarray, ...] | None:
    """Exhaustive search for an invertible intertwiner x → y (small Hom spaces only)."""
    if x.dims != y.dims:
        return None
    basis = homomorphisms(x, y)
    if x.p ** len(basis) > limit:
        raise ValueError("Hom space too large for exhaustive search")
    for coeffs in product(range(x.p), repeat=len(basis)):
        f = [np.zeros((y.dims[i], x.dims[i]), dtype=np.int64) for i in range(x.n)]
        for c, b in zip(coeffs, basis):
            if c:
                for i in range(x.n):
                    f[i] = f[i] + c * b[i]
        f = [m % x.p for m in f]
        if all(gfp.is_invertible(m, x.p) for m in f):
            return tuple(f)
    return None


@dataclass(frozen=True)
class SubRep:
    """Subrepresentation given by column bases at every node."""

    bases: tuple[np.ndarray, ...]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(b.shape[1] for b in self.bases)

    def to_json(self) -> dict:
        return {"dims": list(self.dims), "bases": [b.tolist() for b in self.bases]}


def is_subrep(r: QuiverRep, s: SubRep) -> bool:
    for k in range(r.n):
        img = gfp.matmul(r.maps[k], s.bases[k], r.p)
        tgt = s.bases[(k + 1) % r.n]
        if gfp.rank(np.hstack([tgt, img]), r.p) != gfp.rank(tgt, r.p):
            return False
    return all(gfp.rank(b, r.p) == b.shape[1] for b in s.bases)


def _preimage_candidates(r: QuiverRep, j: int, target: np.ndarray) -> np.ndarray:
    """Basis of {v ∈ V_j : φ(v) ∈ span(target)}."""
    phi = r.maps[j]
    a = np.hstack([phi, (-target) % r.p])
    ns = gfp.nullspace(a, r.p)
    return gfp.column_space(ns[:r.dims[j], :], r.p)


def elementary_filtration(r: QuiverRep, constant: bool = False) -> list[SubRep]:
    """Chain 0 = r_0 ⊂ r_1 ⊂ … ⊂ r of subrepresentations.

    Default: every step adds one dimension at one node, taking the lowest node
    that admits a step.  ``constant=True`` (constant dimension vector (d, …, d)
    only): steps of dimension (1, …, 1), assembled from tails of segments.
    """
    if constant:
        return _constant_filtration(r)
    n, p = r.n, r.p
    bases = [np.zeros((r.dims[j], 0), dtype=np.int64) for j in range(n)]
    chain = [SubRep(tuple(bases))]
    for _ in range(r.total_dim):
        for j in range(n):
            cand = _preimage_candidates(r, j, bases[(j + 1) % n])
            ext = gfp.extend_basis(bases[j], cand, p)
            if ext.shape[1]:
                bases[j] = np.hstack([bases[j], ext[:, :1]])
                break
        else:
            raise InvalidRepresentation("no elementary step: representation is not nilpotent")
        chain.append(SubRep(tuple(bases)))
    return chain


def _constant_filtration(r: QuiverRep) -> list[SubRep]:
    n = r.n
    if len(set(r.dims)) != 1:
        raise ValueError(f"dimension vector {r.dims} is not constant")
    depth = r.dims[0]
    dec = decompose(r)
    segs = dec.multisegment.segments
    lay = _layout(dec.multisegment, n)

    def layer_options(tails: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        # grow each segment's tail so the new positions cover every node exactly once
        def rec(s: int, cover: list[int], new: list[int]):
            if s == len(segs):
                if all(c == 1 for c in cover):
                    yield tuple(new)
                return
            seg = segs[s]
            for extra in range(0, seg.length - tails[s] + 1):
                top = seg.length - tails[s] - extra
                added = [(seg.start + t) % n for t in range(top, seg.length - tails[s])]
                trial = list(cover)
                for node in added:
                    trial[node] += 1
                if max(trial, default=0) > 1:
                    break
                yield from rec(s + 1, trial, new + [tails[s] + extra])
        yield from rec(0, [0] * n, [])

    def search(tails: tuple[int, ...], level: int) -> list[tuple[int, ...]] | None:
        if level == depth:
            return [tails]
        for nxt in layer_options(tails):
            rest = search(nxt, level + 1)
            if rest is not None:
                return [tails] + rest
        return None

    steps = search(tuple(0 for _ in segs), 0)
    if steps is None:
        raise RuntimeError("no constant-degree filtration found")
    chain = []
    for tails in steps:
        cols: list[list[int]] = [[] for _ in range(n)]
        for s, seg in enumerate(segs):
            for t in range(seg.length - tails[s], seg.length):
                node, col = lay[(s, t)]
                cols[node].append(col)
        chain.append(SubRep(tuple(dec.certificate[j][:, sorted(cols[j])] for j in range(n))))
    return chain


def _extended_degree(degrees: Sequence[int], rank: int, i: int) -> int:
    n = len(degrees)
    q, rmd = divmod(i, n)
    return degrees[rmd] + q * rank


def _check_degrees(degrees: Sequence[int], rank: int) -> None:
    n = len(degrees)
    if rank < 1:
        raise ValueError("rank must be positive")
    for i in range(n):
        if _extended_degree(degrees, rank, i + 1) < _extended_degree(degrees, rank, i):
            raise ValueError(f"degree vector {tuple(degrees)} is not increasing along the flag")


def predicted_dims_vs_bundle(i0: int, degrees: Sequence[int], rank: int) -> tuple[int, int]:
    """(dim Hom(E, T), dim Ext¹(T, E)) for T one-dimensional at index i0.

    ``degrees[i]`` is deg E^{(i)} for 0 ≤ i < n; beyond that range the flag is
    extended periodically, deg E^{(i+n)} = deg E^{(i)} + rank.
    """
    _check_degrees(degrees, rank)
    hom = _extended_degree(degrees, rank, i0) - _extended_degree(degrees, rank, i0 - 1)
    ext = _extended_degree(degrees, rank, i0 + 1) - _extended_degree(degrees, rank, i0)
    return hom, ext


def predicted_dims_for_torsion(torsion_dims: Sequence[int], degrees: Sequence[int],
                               rank: int) -> tuple[int, int]:
    """Sum of the elementary predictions along an elementary filtration."""
    hom = ext = 0
    for i0, mult in enumerate(torsion_dims):
        h, e = predicted_dims_vs_bundle(i0, degrees, rank)
        hom += mult * h
        ext += mult * e
    return hom, ext


def random_nilpotent(n: int, p: int, dims: Sequence[int], rng: np.random.Generator,
                     tries: int = 10_000) -> QuiverRep:
    """Uniformly random maps, rejected until the cycle composite is nilpotent."""
    for _ in range(tries):
        maps = [rng.integers(0, p, size=(dims[(k + 1) % n], dims[k])) for k in range(n)]
        r = QuiverRep(n, p, dims, maps)
        if validate(r):
            return r
    raise RuntimeError("no nilpotent representation sampled")


def random_conjugate(r: QuiverRep, rng: np.random.Generator) -> QuiverRep:
    return conjugate(r, [gfp.random_invertible(d, r.p, rng) for d in r.dims])
