"""Non-negative integer factorization G = B B^T of Gram matrices.

Rows are processed in order.  Row ``i`` first reuses existing columns (a
depth-first search over non-negative integer vectors matching the inner
products with earlier rows), then opens new columns carrying the leftover
norm as a non-increasing list of integers whose squares add up to it.
Columns that agree on all earlier rows are interchangeable, so values on
such a block are required to be non-increasing; this removes the trivial
column permutations from the enumeration.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np


class GramError(ValueError):
    pass


def square_partitions(n: int, cap: int | None = None) -> Iterator[list[int]]:
    """Non-increasing lists of positive integers whose squares sum to ``n``."""
    if n == 0:
        yield []
        return
    top = int(math.isqrt(n))
    if cap is not None:
        top = min(top, cap)
    for v in range(top, 0, -1):
        for rest in square_partitions(n - v * v, v):
            yield [v] + rest


def factor_gram(G, max_solutions: int = 2, node_limit: int = 2_000_000) -> list[np.ndarray]:
    """All (up to ``max_solutions``) factorizations up to column permutation.

    Returned matrices have shape (n, r) with no zero column.  An empty list
    means no factorization exists.
    """
    G = np.asarray(G)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise GramError("Gram matrix must be square")
    if not np.array_equal(G, G.T):
        raise GramError("Gram matrix is not symmetric")
    if np.any(G < 0) or not np.issubdtype(G.dtype, np.integer):
        raise GramError("Gram matrix must have non-negative integer entries")
    n = G.shape[0]
    G = G.astype(np.int64)
    solutions: list[np.ndarray] = []
    budget = [node_limit]

    def row_options(i: int, ncols: int, colmat: np.ndarray):
        """Yield value vectors over the existing columns for row i."""
        target = G[i, :i].copy()
        if ncols == 0:
            if np.all(target == 0):
                yield np.zeros(0, dtype=np.int64)
            return
        # columns touching a row j with G[i, j] == 0 are excluded
        zero_rows = target == 0
        allowed = ~np.any(colmat[zero_rows] > 0, axis=0) if i else np.ones(ncols, bool)
        cand = np.flatnonzero(allowed)
        # interchangeable columns: identical on all earlier rows
        keys = [colmat[:, c].tobytes() for c in cand]
        prev_same = [-1] * len(cand)
        last: dict = {}
        for pos, key in enumerate(keys):
            prev_same[pos] = last.get(key, -1)
            last[key] = pos
        # for each remaining position, which rows can still be served
        support = colmat[:, cand] > 0
        remaining_cover = np.zeros((len(cand) + 1, i), dtype=bool)
        for pos in range(len(cand) - 1, -1, -1):
            remaining_cover[pos] = remaining_cover[pos + 1] | support[:, pos]
        x = np.zeros(ncols, dtype=np.int64)
        diag = G[i, i]

        def dfs(pos: int, resid: np.ndarray, norm: int):
            budget[0] -= 1
            if budget[0] < 0:
                raise GramError("factorization search exceeded its node budget")
            need = resid > 0
            if np.any(need & ~remaining_cover[pos]):
                return
            if pos == len(cand):
                yield x.copy()
                return
            c = cand[pos]
            col = colmat[:, c]
            nz = col > 0
            hi = int(math.isqrt(diag - norm))
            if np.any(nz):
                hi = min(hi, int(np.min(resid[nz] // col[nz])))
            if prev_same[pos] >= 0:
                hi = min(hi, int(x[cand[prev_same[pos]]]))
            for v in range(hi, -1, -1):
                x[c] = v
                yield from dfs(pos + 1, resid - v * col, norm + v * v)
            x[c] = 0

        yield from dfs(0, target, 0)

    def solve(i: int, colmat: np.ndarray):
        if len(solutions) >= max_solutions:
            return
        if i == n:
            solutions.append(colmat.copy())
            return
        ncols = colmat.shape[1]
        for x in row_options(i, ncols, colmat[:i]):
            left = int(G[i, i] - x @ x)
            if left < 0:
                continue
            for part in square_partitions(left):
                newcols = np.zeros((n, len(part)), dtype=np.int64)
                newcols[i] = part
                block = np.concatenate([colmat, newcols], axis=1)
                block[i, :ncols] = x
                solve(i + 1, block)
                if len(solutions) >= max_solutions:
                    return

    solve(0, np.zeros((n, 0), dtype=np.int64))
    return solutions


def canonical_columns(B: np.ndarray) -> np.ndarray:
    """Sort columns by the row of their first nonzero entry, then lexicographically."""
    B = np.asarray(B)
    keys = []
    for c in range(B.shape[1]):
        col = B[:, c]
        first = int(np.flatnonzero(col)[0])
        keys.append((first, tuple(-col)))
    order = sorted(range(B.shape[1]), key=lambda c: keys[c])
    return B[:, order]


def min_norm_dims(B: np.ndarray, dims: Sequence[float]) -> np.ndarray:
    """Minimum-norm solution x of B x = dims.

    Identical columns receive identical entries, which is the equal split.
    """
    B = np.asarray(B, dtype=float)
    x, *_ = np.linalg.lstsq(B, np.asarray(dims, dtype=float), rcond=None)
    return x


def split_fractions(B: np.ndarray, dims: Sequence[float], tol: float = 1e-9) -> list[tuple[int, Fraction]]:
    """Express each column dim as a rational multiple of the dim of its first generator."""
    x = min_norm_dims(B, dims)
    out = []
    for c in range(B.shape[1]):
        g = int(np.flatnonzero(B[:, c])[0])
        ratio = Fraction(float(x[c] / dims[g])).limit_denominator(64)
        if abs(float(ratio) - x[c] / dims[g]) > tol:
            raise GramError(f"column {c} has a non-rational share of generator {g}")
        out.append((g, ratio))
    return out
