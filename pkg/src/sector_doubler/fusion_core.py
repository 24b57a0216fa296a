"""Commutative fusion rings, in particular the SU(2)_k and SU(3)_k Verlinde rings.

Labels are kept in a canonical order (SU(2): ascending spin ``j``; SU(3):
lexicographic ``(p, q)`` with ``0 <= q <= p <= k``).  SU(3) weights are
written in the two-row notation ``(p, q)``; the Dynkin labels are
``(p - q, q)``, the n-ality is ``(p + q) mod 3`` and the dual of ``(p, q)``
is ``(p, p - q)``.

Fusion coefficients are exact integers.  SU(3) fusion uses the Kac-Walton
algorithm (Brauer-Klimyk sum over the weights of one factor, folded into the
level-k alcove by the affine Weyl group).  Quantum dimensions come from
power iteration on the fundamental fusion matrix.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .report import Report

DIM_TOL = 1e-9
SU2_MAX_LEVEL = 64
SU3_MAX_LEVEL = 32


class FusionRingError(ValueError):
    pass


@dataclass(frozen=True)
class Label:
    index: int
    name: str
    weight: tuple[int, ...]
    color: int = 0

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, eq=False)
class FusionRing:
    """Fusion ring with fusion[a, b, c] = N_{a,b}^c."""

    algebra: str
    level: int
    labels: tuple[Label, ...]
    fusion: np.ndarray
    conj: tuple[int, ...]
    dims: np.ndarray
    identity: int = 0
    n_colors: int = 1
    generators: tuple[int, ...] = ()
    commutative: bool = True
    _lookup: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.fusion.setflags(write=False)
        self.dims.setflags(write=False)
        for lab in self.labels:
            self._lookup[lab.name] = lab.index
            self._lookup[lab.weight] = lab.index

    @property
    def rank(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __repr__(self) -> str:
        return f"FusionRing({self.algebra}, level={self.level}, rank={self.rank})"

    @property
    def title(self) -> str:
        if self.algebra in ("su2", "su3"):
            return f"SU({self.algebra[-1]})_{self.level}"
        return self.algebra

    def index(self, key) -> int:
        """Index of a label given as Label, index, name or weight tuple."""
        if isinstance(key, Label):
            return key.index
        if isinstance(key, (int, np.integer)):
            if not 0 <= key < self.rank:
                raise FusionRingError(f"label index {key} outside ring of rank {self.rank}")
            return int(key)
        if isinstance(key, list):
            key = tuple(key)
        try:
            return self._lookup[key]
        except (KeyError, TypeError):
            pass
        if isinstance(key, str):
            norm = key.replace(" ", "").removeprefix("j=").removeprefix("(p,q)=")
            if norm in self._lookup:
                return self._lookup[norm]
        raise FusionRingError(f"unknown label {key!r} in {self!r}")

    def label(self, key) -> Label:
        return self.labels[self.index(key)]

    def name(self, i: int) -> str:
        return self.labels[i].name

    def names(self, indices: Iterable[int]) -> list[str]:
        return [self.labels[i].name for i in indices]

    def colors(self) -> np.ndarray:
        return np.array([lab.color for lab in self.labels])

    def matrix(self, key) -> np.ndarray:
        """Fusion matrix (N_a)[b, c] = N_{a,b}^c."""
        return self.fusion[self.index(key)]

    def fuse(self, a, b) -> np.ndarray:
        return self.fusion[self.index(a), self.index(b)].copy()

    def fuse_names(self, a, b) -> dict[str, int]:
        row = self.fuse(a, b)
        return {self.labels[c].name: int(row[c]) for c in np.flatnonzero(row)}

    def to_json(self) -> dict:
        nz = np.argwhere(self.fusion)
        triples = [[int(a), int(b), int(c), int(self.fusion[a, b, c])] for a, b, c in nz]
        return {
            "schema": "v1",
            "algebra": self.algebra,
            "level": self.level,
            "labels": [lab.name for lab in self.labels],
            "colors": [lab.color for lab in self.labels],
            "conj": list(self.conj),
            "fusion": triples,
        }


def ring_from_json(doc: dict) -> FusionRing:
    """Inverse of FusionRing.to_json (dims are recomputed)."""
    if doc.get("schema", "v1") != "v1":
        raise FusionRingError(f"unsupported schema {doc.get('schema')!r}")
    algebra, level = doc["algebra"], int(doc["level"])
    if algebra == "su2":
        return build_su2_ring(level)
    if algebra == "su3":
        return build_su3_ring(level)
    names = list(doc["labels"])
    n = len(names)
    fusion = np.zeros((n, n, n), dtype=np.int64)
    for a, b, c, m in doc["fusion"]:
        fusion[a, b, c] = m
    return make_ring(algebra, names, fusion, colors=doc.get("colors"), level=level)


def make_ring(algebra: str, names: Sequence[str], fusion: np.ndarray, *,
              colors: Sequence[int] | None = None, n_colors: int | None = None,
              level: int = 0, weights: Sequence[tuple] | None = None,
              generators: Sequence[int] = ()) -> FusionRing:
    """Assemble a ring from an explicit fusion tensor; label 0 must be the identity."""
    fusion = np.asarray(fusion, dtype=np.int64)
    n = len(names)
    if fusion.shape != (n, n, n):
        raise FusionRingError(f"fusion tensor shape {fusion.shape} does not match {n} labels")
    if np.any(fusion < 0):
        raise FusionRingError("negative fusion coefficient")
    if colors is None:
        colors = [0] * n
    if n_colors is None:
        n_colors = max(colors) + 1 if n else 1
    if weights is None:
        weights = [(i,) for i in range(n)]
    conj = []
    for a in range(n):
        dual = np.flatnonzero(fusion[a, :, 0])
        if len(dual) != 1:
            raise FusionRingError(f"label {names[a]!r} has no unique dual")
        conj.append(int(dual[0]))
    labels = tuple(Label(i, str(names[i]), tuple(weights[i]), int(colors[i]))
                   for i in range(n))
    if not generators:
        generators = tuple(range(n))
    dims = perron_dims(fusion, generators)
    return FusionRing(algebra, level, labels, fusion, tuple(conj), dims,
                      identity=0, n_colors=n_colors, generators=tuple(generators))


def perron_vector(a: np.ndarray, tol: float = 1e-12, max_iter: int = 200000) -> np.ndarray:
    """Perron-Frobenius eigenvector of a non-negative primitive matrix by power iteration."""
    a = np.asarray(a, dtype=float)
    v = np.ones(a.shape[0]) / np.sqrt(a.shape[0])
    # repeated squaring gets close fast, the plain iteration polishes the residual
    b = a / np.abs(a).sum(axis=1).max()
    for _ in range(6):
        b = b @ b
        b /= np.abs(b).max()
        v = b @ v
        v /= np.linalg.norm(v)
    for _ in range(max_iter):
        w = a @ v
        lam = v @ w
        if np.linalg.norm(w - lam * v) < tol * max(lam, 1.0):
            return v
        v = w / np.linalg.norm(w)
    raise FusionRingError("power iteration did not converge")


def perron_dims(fusion: np.ndarray, generators: Sequence[int]) -> np.ndarray:
    n = fusion.shape[0]
    a = np.eye(n)
    for g in generators:
        a = a + fusion[g] + fusion[g].T
    v = perron_vector(a)
    return v / v[0]


def global_index(ring: FusionRing, subset: Iterable | None = None) -> float:
    """Sum of squared quantum dimensions over ``subset`` (whole ring if None)."""
    if subset is None:
        idx = list(range(ring.rank))
    else:
        idx = [ring.index(s) for s in subset]
    if not idx:
        raise FusionRingError("global index of an empty set")
    return float(np.sum(ring.dims[idx] ** 2))


# --------------------------------------------------------------------------
# SU(2)_k


def su2_coefficient(k: int, a: int, b: int, c: int) -> int:
    if abs(a - b) <= c <= min(a + b, 2 * k - a - b) and (a + b + c) % 2 == 0:
        return 1
    return 0


@lru_cache(maxsize=None)
def build_su2_ring(k: int) -> FusionRing:
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= SU2_MAX_LEVEL:
        raise FusionRingError(f"SU(2) level must be in [1, {SU2_MAX_LEVEL}], got {k!r}")
    n = k + 1
    fusion = np.zeros((n, n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            for c in range(abs(a - b), min(a + b, 2 * k - a - b) + 1, 2):
                fusion[a, b, c] = 1
    return make_ring("su2", [str(j) for j in range(n)], fusion,
                     colors=[j % 2 for j in range(n)], n_colors=2, level=k,
                     weights=[(j,) for j in range(n)], generators=(1,))


# --------------------------------------------------------------------------
# SU(3)_k


def su3_weights(k: int) -> list[tuple[int, int]]:
    return [(p, q) for p in range(k + 1) for q in range(p + 1)]


def su3_name(w: tuple[int, int]) -> str:
    return f"({w[0]},{w[1]})"


def _dynkin(w: tuple[int, int]) -> tuple[int, int]:
    return (w[0] - w[1], w[1])


def _from_dynkin(a: int, b: int) -> tuple[int, int]:
    return (a + b, b)


def _convolve(x: Counter, y: Counter) -> Counter:
    out: Counter = Counter()
    for wx, mx in x.items():
        for wy, my in y.items():
            out[(wx[0] + wy[0], wx[1] + wy[1])] += mx * my
    return out


@lru_cache(maxsize=None)
def su3_character(a: int, b: int) -> tuple[tuple[tuple[int, int], int], ...]:
    """Weight multiplicities (Dynkin basis) of the classical SU(3) irrep (a, b)."""
    if b == 0 or a == 0:
        # symmetric powers of the defining rep, or their duals
        m = a + b
        basis = [(1, 0), (-1, 1), (0, -1)]
        out: Counter = Counter()
        for i in range(m + 1):
            for j in range(m - i + 1):
                l = m - i - j
                w = (i * basis[0][0] + j * basis[1][0] + l * basis[2][0],
                     i * basis[0][1] + j * basis[1][1] + l * basis[2][1])
                out[w] += 1
        if a == 0:
            out = Counter({(-w[0], -w[1]): v for w, v in out.items()})
        return tuple(sorted(out.items()))
    # V(a,0) x V(0,b) = sum_{i=0}^{min(a,b)} V(a-i, b-i)
    prod = _convolve(Counter(dict(su3_character(a, 0))), Counter(dict(su3_character(0, b))))
    for i in range(1, min(a, b) + 1):
        prod.subtract(Counter(dict(su3_character(a - i, b - i))))
    prod = +prod
    return tuple(sorted(prod.items()))


def _fold_su3(x: np.ndarray, y: np.ndarray, height: int):
    """Reflect shifted weights into the alcove x > 0, y > 0, x + y < height."""
    sign = np.ones_like(x)
    for _ in range(4 * height + 8):
        m1 = x < 0
        x, y = np.where(m1, -x, x), np.where(m1, x + y, y)
        sign = np.where(m1, -sign, sign)
        m2 = y < 0
        x, y = np.where(m2, x + y, x), np.where(m2, -y, y)
        sign = np.where(m2, -sign, sign)
        m0 = x + y > height
        x, y = np.where(m0, height - y, x), np.where(m0, height - x, y)
        sign = np.where(m0, -sign, sign)
        if not (m1.any() or m2.any() or m0.any()):
            break
    else:  # pragma: no cover - the affine Weyl group action always terminates
        raise FusionRingError("Kac-Walton folding did not terminate")
    wall = (x == 0) | (y == 0) | (x + y == height)
    return x, y, np.where(wall, 0, sign)


def su3_kac_walton(k: int) -> np.ndarray:
    weights = su3_weights(k)
    n = len(weights)
    height = k + 3
    pos = {w: i for i, w in enumerate(weights)}
    # Dynkin label -> index lookup table, padded so out-of-alcove never indexes
    table = -np.ones((k + 2, k + 2), dtype=np.int64)
    for w, i in pos.items():
        a, b = _dynkin(w)
        table[a, b] = i
    dyn = np.array([_dynkin(w) for w in weights])
    fusion = np.zeros((n, n, n), dtype=np.int64)
    for j, wmu in enumerate(weights):
        char = su3_character(*_dynkin(wmu))
        wts = np.array([w for w, _ in char])
        mult = np.array([m for _, m in char])
        x = dyn[:, None, 0] + wts[None, :, 0] + 1
        y = dyn[:, None, 1] + wts[None, :, 1] + 1
        x, y, sign = _fold_su3(x, y, height)
        coeff = sign * mult[None, :]
        live = coeff != 0
        lam = np.broadcast_to(np.arange(n)[:, None], x.shape)[live]
        nu = table[x[live] - 1, y[live] - 1]
        np.add.at(fusion, (lam, j, nu), coeff[live])
    if np.any(fusion < 0):
        raise FusionRingError("Kac-Walton produced a negative coefficient")
    return fusion


@lru_cache(maxsize=None)
def build_su3_ring(k: int) -> FusionRing:
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= SU3_MAX_LEVEL:
        raise FusionRingError(f"SU(3) level must be in [1, {SU3_MAX_LEVEL}], got {k!r}")
    weights = su3_weights(k)
    fusion = su3_kac_walton(k)
    fund = weights.index((1, 0))
    return make_ring("su3", [su3_name(w) for w in weights], fusion,
                     colors=[(p + q) % 3 for p, q in weights], n_colors=3, level=k,
                     weights=weights, generators=(fund,))


def build_ring(algebra: str, level: int) -> FusionRing:
    if algebra == "su2":
        return build_su2_ring(level)
    if algebra == "su3":
        return build_su3_ring(level)
    raise FusionRingError(f"unknown algebra {algebra!r}")


def fuse(ring: FusionRing, a, b) -> np.ndarray:
    return ring.fuse(a, b)


# --------------------------------------------------------------------------
# validation


def verify_ring(ring: FusionRing, full_assoc_max: int = 64) -> Report:
    """Check every ring axiom; failures carry the first counterexample."""
    n = ring.rank
    N = ring.fusion
    c = np.array(ring.conj)
    rep = Report(f"verify_ring {ring.title}")
    eye = np.eye(n, dtype=np.int64)

    bad = np.argwhere(N[ring.identity] != eye)
    bad2 = np.argwhere(N[:, ring.identity, :] != eye)
    wit = tuple(bad[0]) if len(bad) else (tuple(bad2[0]) if len(bad2) else None)
    rep.add("unit", wit is None, "" if wit is None else f"N[id] mismatch at {wit}", wit)

    want = (np.arange(n)[None, :] == c[:, None]).astype(np.int64)
    bad = np.argwhere(N[:, :, ring.identity] != want)
    rep.add("duality", len(bad) == 0,
            "" if not len(bad) else f"N[a][b][id] != delta(b, conj a) at {tuple(bad[0])}",
            tuple(bad[0]) if len(bad) else None)

    rep.add("conj_involution", bool(np.all(c[c] == np.arange(n))))

    bad = np.argwhere(N != N.transpose(1, 0, 2))
    rep.add("commutativity", len(bad) == 0,
            "" if not len(bad) else f"N[a][b][c] != N[b][a][c] at {tuple(bad[0])}",
            tuple(bad[0]) if len(bad) else None)

    rep.add("associativity", *_check_assoc(ring, full_assoc_max))

    bad = np.argwhere(N != N[np.ix_(c, c, c)])
    rep.add("conjugation_symmetry", len(bad) == 0,
            "" if not len(bad) else f"at {tuple(bad[0])}",
            tuple(bad[0]) if len(bad) else None)

    d = ring.dims
    lhs = np.einsum("abc,c->ab", N.astype(float), d)
    err = np.abs(lhs - np.outer(d, d))
    worst = np.unravel_index(np.argmax(err), err.shape)
    rep.add("dims_perron", bool(err.max() < DIM_TOL * max(1.0, d.max() ** 2)) and bool(np.all(d > 0)),
            f"max |d_a d_b - sum N d| = {err.max():.2e}", tuple(int(i) for i in worst))
    rep.add("dims_conj", bool(np.allclose(d, d[c], atol=DIM_TOL)))

    col = ring.colors()
    nz = np.argwhere(N > 0)
    viol = nz[(col[nz[:, 0]] + col[nz[:, 1]] - col[nz[:, 2]]) % ring.n_colors != 0]
    rep.add("color_additivity", len(viol) == 0,
            "" if not len(viol) else f"at {tuple(viol[0])}",
            tuple(viol[0]) if len(viol) else None)
    return rep


def _check_assoc(ring: FusionRing, full_max: int):
    n = ring.rank
    # float matmuls are exact here: entries and partial sums stay far below 2**53
    Nf = ring.fusion.astype(float)
    flat = Nf.reshape(n * n, n)                      # [(a,b), s]
    if n <= full_max:
        # (a b) c versus a (b c), coefficient of t
        left = (flat @ Nf.reshape(n, n * n)).reshape(n, n, n, n)                    # [a,b,c,t]
        right = (flat @ Nf.transpose(1, 0, 2).reshape(n, n * n)).reshape(n, n, n, n)  # [b,c,a,t]
        right = right.transpose(2, 0, 1, 3)
        bad = np.argwhere(left != right)
        if len(bad):
            w = tuple(int(i) for i in bad[0])
            return False, f"(a b) c != a (b c) at (a,b,c,t)={w}", w
        return True, "all triples", None
    # for larger rings: associativity of every triple involving a generator;
    # the generators and their duals generate the ring, so this suffices.
    gens = sorted(set(ring.generators) | {ring.conj[g] for g in ring.generators})
    by_s = Nf.transpose(1, 0, 2).reshape(n, n * n)   # [s, (b,t)]
    by_a = Nf.reshape(n, n * n)                      # [s, (a,t)]
    for g in gens:
        lhs = (Nf[g] @ by_s).reshape(n, n, n).transpose(1, 0, 2)   # [b,a,t] = (N_g N_b)[a,t]
        rhs = (Nf[g] @ by_a).reshape(n, n, n)                      # [b,a,t] = sum_s N_gb^s N_s[a,t]
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            b, a, t = (int(i) for i in bad[0])
            w = (int(g), b, a, t)
            return False, f"generator triple mismatch at (g,b,a,t)={w}", w
    return True, f"generator triples ({len(gens)} generators)", None


def ring_to_json_text(ring: FusionRing) -> str:
    return json.dumps(ring.to_json(), sort_keys=True)
