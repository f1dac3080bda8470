"""Dense linear algebra over F_p on numpy int64 arrays.

Entries are kept reduced to 0..p-1.  Matrices here are at most a few dozen
rows, so plain Gaussian elimination is enough.
"""

from __future__ import annotations

import numpy as np


def as_mat(a, p: int, shape: tuple[int, int] | None = None) -> np.ndarray:
    m = np.array(a, dtype=np.int64)
    if shape is not None:
        m = m.reshape(shape)
    return m % p


def rref(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    r = np.array(a, dtype=np.int64) % p
    rows, cols = r.shape
    pivots: list[int] = []
    row = 0
    for col in range(cols):
        if row == rows:
            break
        nz = np.nonzero(r[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + nz[0]
        if piv != row:
            r[[row, piv]] = r[[piv, row]]
        r[row] = (r[row] * pow(int(r[row, col]), -1, p)) % p
        for other in range(rows):
            if other != row and r[other, col]:
                r[other] = (r[other] - r[other, col] * r[row]) % p
        pivots.append(col)
        row += 1
    return r, pivots


def rank(a: np.ndarray, p: int) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(rref(a, p)[1])


def nullspace(a: np.ndarray, p: int) -> np.ndarray:
    """Basis of {x : a·x = 0} as the columns of the returned matrix."""
    a = np.asarray(a, dtype=np.int64)
    cols = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    r, pivots = rref(a, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    for k, fcol in enumerate(free):
        basis[fcol, k] = 1
        for i, pc in enumerate(pivots):
            basis[pc, k] = (-r[i, fcol]) % p
    return basis


def inverse(a: np.ndarray, p: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    if n == 0:
        return a.copy()
    r, pivots = rref(np.hstack([a % p, np.eye(n, dtype=np.int64)]), p)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular mod p")
    return r[:, n:]


def is_invertible(a: np.ndarray, p: int) -> bool:
    a = np.asarray(a)
    return a.shape[0] == a.shape[1] and rank(a, p) == a.shape[0]


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) % p


def column_space(a: np.ndarray, p: int) -> np.ndarray:
    """Columns of a forming a basis of its span (first independent columns)."""
    a = np.asarray(a, dtype=np.int64)
    if a.shape[1] == 0:
        return a
    _, pivots = rref(a, p)
    return a[:, pivots]


def extend_basis(base: np.ndarray, candidates: np.ndarray, p: int) -> np.ndarray:
    """Candidate columns (in order) that extend the span of ``base`` independently."""
    base = np.asarray(base, dtype=np.int64)
    candidates = np.asarray(candidates, dtype=np.int64)
    cur = base
    chosen = []
    r = rank(cur, p) if cur.size else 0
    for k in range(candidates.shape[1]):
        trial = np.hstack([cur, candidates[:, k:k + 1]]) if cur.size else candidates[:, k:k + 1]
        r2 = rank(trial, p)
        if r2 > r:
            cur, r = trial, r2
            chosen.append(k)
    return candidates[:, chosen]


def random_invertible(n: int, p: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        m = rng.integers(0, p, size=(n, n))
        if is_invertible(m, p):
            return m.astype(np.int64)
