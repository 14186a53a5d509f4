"""Dense linear algebra over F2 on numpy uint8 arrays."""

from __future__ import annotations

import numpy as np

__all__ = ["rref", "rank", "nullspace", "solve"]


def rref(mat: np.ndarray, cols=None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F2.

    Columns are visited in the order given by `cols` (default: left to right).
    Returns the reduced matrix and the list of pivot columns.
    """
    m = np.array(mat, dtype=np.uint8) & 1
    if m.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    rows = m.shape[0]
    order = range(m.shape[1]) if cols is None else cols
    pivots: list[int] = []
    r = 0
    for c in order:
        if r == rows:
            break
        hits = np.flatnonzero(m[r:, c])
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        targets = np.flatnonzero(m[:, c])
        targets = targets[targets != r]
        if targets.size:
            m[targets] ^= m[r]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(mat: np.ndarray) -> int:
    return len(rref(mat)[1])


def nullspace(mat: np.ndarray) -> np.ndarray:
    """Basis (as rows) of {v : mat @ v = 0 mod 2}."""
    m = np.array(mat, dtype=np.uint8) & 1
    ncols = m.shape[1]
    red, pivots = rref(m)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = np.zeros((len(free), ncols), dtype=np.uint8)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, p in enumerate(pivots):
            basis[k, p] = red[i, f]
    return basis


def solve(mat: np.ndarray, rhs: np.ndarray) -> np.ndarray | None:
    """One solution x of mat @ x = rhs over F2, or None if inconsistent."""
    m = np.array(mat, dtype=np.uint8) & 1
    b = np.array(rhs, dtype=np.uint8).reshape(-1, 1) & 1
    aug = np.hstack([m, b])
    red, pivots = rref(aug, cols=range(m.shape[1] + 1))
    if m.shape[1] in pivots:
        return None
    x = np.zeros(m.shape[1], dtype=np.uint8)
    for i, p in enumerate(pivots):
        x[p] = red[i, -1]
    return x
