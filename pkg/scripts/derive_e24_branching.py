"""Recover the SU(3)_21 branching rules into the two (E7)_1 sectors.

The branching matrix b (rows: E7 level-one sectors 0 and 1, columns: SU(3)_21
labels) intertwines the modular data:  b S = S_ext b  and  b T = T_ext b.
The T relation only allows label lam in row l when h_lam = h_l mod 1
(h_0 = 0, h_1 = 3/4 for (E7)_1).  On the allowed entries the S relation is a
homogeneous linear system; this script computes its nullspace, shows it is
one-dimensional, normalises it by b[0][(0,0)] = 1 and prints the rows.

Usage:  python3 scripts/derive_e24_branching.py
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from sector_doubler.fusion_core import build_ring
from sector_doubler.modular_data import conformal_weights, standard_modular

H_EXT = [Fraction(0), Fraction(3, 4)]
S_EXT = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


def main() -> int:
    ring = build_ring("su3", 21)
    md = standard_modular("su3", 21)
    h = conformal_weights("su3", 21)
    n = ring.rank
    allowed = [(l, lam) for l in range(2) for lam in range(n) if (h[lam] - H_EXT[l]).denominator == 1]
    print(f"{len(allowed)} entries allowed by the T relation")
    # b S - S_ext b = 0, written as a matrix acting on the allowed unknowns
    rows = np.zeros((2 * n, len(allowed)), dtype=complex)
    for k, (l, lam) in enumerate(allowed):
        rows[l * n:(l + 1) * n, k] += md.S[lam, :]            # (b S)[l, mu] gets b[l, lam] S[lam, mu]
        for l2 in range(2):
            rows[l2 * n + lam, k] -= S_EXT[l2, l]              # (S_ext b)[l2, lam] gets S_ext[l2, l] b[l, lam]
    A = np.vstack([rows.real, rows.imag])
    _, sv, vt = np.linalg.svd(A)
    null = int(np.sum(sv < 1e-9 * sv[0])) + max(0, A.shape[1] - len(sv))
    print(f"nullspace dimension: {null}")
    if null != 1:
        print("the branching is not determined by modular data alone")
        return 1
    x = vt[-1]
    x = x / x[allowed.index((0, ring.identity))]
    if not np.allclose(x, np.round(x), atol=1e-8):
        print("normalised solution is not integral")
        return 1
    x = np.round(x).astype(int)
    for l in range(2):
        lams = [ring.labels[lam].name for k, (ll, lam) in enumerate(allowed) if ll == l and x[k]]
        vals = sorted({int(x[k]) for k, (ll, _) in enumerate(allowed) if ll == l and x[k]})
        print(f"tau_{l} (h = {H_EXT[l]}): {len(lams)} labels with coefficients {vals}")
        print("   " + " ".join(lams))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
