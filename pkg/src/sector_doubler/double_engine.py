"""Pairings of eta-extended sectors and the resolution of quantum double systems.

Every pairing below is a Hom-space dimension between products of
eta-extensions, written purely in terms of fusion coefficients, the modular
invariant Z (or branching coefficients b) and the degenerate / relative
permutant sets of the colour-zero subsystem.  ``build_gram`` collects them
into a Gram matrix over a generating family, and ``resolve_sectors`` splits
that family into irreducibles by integer factorization of the Gram matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .fusion_core import FusionRing
from .gram import GramError, factor_gram, canonical_columns, min_norm_dims
from .inclusion_data import (
    InclusionSpec, color_zero_ambichirals, modular_invariant_Z,
)
from .modular_data import ModularData, Subsystem, is_nondegenerate
from .report import Report

INDEX_RTOL = 1e-8


class DoubleError(ValueError):
    pass


@dataclass(frozen=True)
class ProductSector:
    """eta(alpha+_lam) eta(tau) (kind "chiral") or eta(alpha+_lam) eta(alpha-_mu) (kind "full")."""

    kind: str
    lam: int
    other: int
    dim: float
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("chiral", "full"):
            raise DoubleError(f"unknown product kind {self.kind!r}")
        if not self.dim > 0:
            raise DoubleError("product sector dimension must be positive")


@dataclass
class Irreducible:
    name: str
    dim: float
    share: Fraction                       # dim / dim(representative generator)
    content: list[tuple[int, int]]        # (generator index, multiplicity)

    @property
    def representative(self) -> int:
        return self.content[0][0]


@dataclass
class SectorSystem:
    name: str
    kind: str
    generators: list[ProductSector]
    gram: np.ndarray
    B: np.ndarray | None = None
    irreducibles: list[Irreducible] = field(default_factory=list)
    certificate: Report | None = None
    target_index: float | None = None

    @property
    def resolved(self) -> bool:
        return self.B is not None

    def splits(self) -> list[tuple[str, int]]:
        """Generators whose pieces are all disjoint from earlier generators, with the piece count."""
        out = []
        if self.B is None:
            return out
        counts: dict[int, int] = {}
        for irr in self.irreducibles:
            counts[irr.representative] = counts.get(irr.representative, 0) + 1
        for g, m in counts.items():
            if m > 1:
                out.append((self.generators[g].name, m))
        return out

    def identifications(self) -> list[list[str]]:
        """Classes of generators that are equal to one irreducible."""
        G = self.gram
        n = len(self.generators)
        seen, out = set(), []
        for i in range(n):
            if i in seen or G[i, i] != 1:
                continue
            cls = [j for j in range(n) if G[i, j] == 1 and G[j, j] == 1]
            seen.update(cls)
            if len(cls) > 1:
                out.append([self.generators[j].name for j in cls])
        return out

    def to_json(self) -> dict:
        out = {
            "schema": "v1",
            "name": self.name,
            "kind": self.kind,
            "generators": [{"name": g.name, "lam": g.lam, "other": g.other, "dim": g.dim}
                           for g in self.generators],
            "gram": self.gram.tolist(),
        }
        if self.B is not None:
            out["B"] = self.B.tolist()
            out["irreducibles"] = [
                {"name": irr.name, "dim": irr.dim, "share": str(irr.share),
                 "content": [[self.generators[g].name, m] for g, m in irr.content]}
                for irr in self.irreducibles
            ]
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        if self.target_index is not None:
            out["target_index"] = self.target_index
        return out


# --------------------------------------------------------------------------
# pairing formulas


class AmbiguousFactorization(DoubleError):
    """Several integer factorizations survive and no target index selects one."""

    def __init__(self, msg: str, shapes: list[int]):
        super().__init__(msg)
        self.shapes = shapes


def _sets(sub: Subsystem):
    if sub.deg is None or sub.per is None:
        raise DoubleError("subsystem needs its degenerate set and relative permutant")
    return list(sub.deg), list(sub.per)


def pair_same_sign(md: ModularData, sub: Subsystem, Z: np.ndarray, lam, mu) -> int:
    ring = md.ring
    l, m = ring.index(lam), ring.index(mu)
    deg, _ = _sets(sub)
    return int(sum(ring.fusion[r, l, m] * Z[r, 0] for r in deg))


def pair_mixed_sign(md: ModularData, sub: Subsystem, Z: np.ndarray, lam, mu) -> int:
    ring = md.ring
    l, m = ring.index(lam), ring.index(mu)
    _, per = _sets(sub)
    if l in per and m in per:
        return pair_same_sign(md, sub, Z, l, m)
    return 0


def pair_full(md: ModularData, sub: Subsystem, Z: np.ndarray, lam, mu, lam2, mu2) -> int:
    """<eta(a+_lam) eta(a-_mu), eta(a+_lam2) eta(a-_mu2)>."""
    ring = md.ring
    N = ring.fusion
    c = ring.conj
    l, m, l2, m2 = (ring.index(x) for x in (lam, mu, lam2, mu2))
    deg, per = _sets(sub)
    left = N[c[l2], l][per]            # N^nu_{conj lam2, lam} for nu in per
    right = N[m2, c[m]][per]           # N^xi_{mu2, conj mu} for xi in per
    zdeg = np.array([Z[r, 0] for r in deg])
    inner = N[np.ix_(per, per, deg)] @ zdeg     # sum_rho N^rho_{nu xi} Z_{rho 0}
    return int(left @ inner @ right)


def _ambi_index(spec: InclusionSpec, tau) -> int:
    if isinstance(tau, (int, np.integer)):
        return int(tau)
    return spec.ambichiral.index(str(tau))


def pair_ambi_alpha(md: ModularData, sub: Subsystem, spec: InclusionSpec, tau, lam) -> int:
    """<eta(a+_lam), eta(tau)>: the branching coefficient when lam lies in the relative permutant."""
    l = md.ring.index(lam)
    t = _ambi_index(spec, tau)
    _, per = _sets(sub)
    return int(spec.branching[t, l]) if l in per else 0


def pair_chiral(md: ModularData, sub: Subsystem, spec: InclusionSpec, lam, tau, mu, tau2) -> int:
    """<eta(a+_lam) eta(tau), eta(a+_mu) eta(tau2)>."""
    ring = md.ring
    amb = spec.ambichiral
    l, m = ring.index(lam), ring.index(mu)
    t, t2 = _ambi_index(spec, tau), _ambi_index(spec, tau2)
    _, per = _sets(sub)
    amb_row = amb.fusion[amb.conj[t], t2]                     # N^{tau''}_{conj tau, tau2}
    nn_row = ring.fusion[l, ring.conj[m]][per]                # N^rho_{lam, conj mu}, rho in per
    return int(amb_row @ spec.branching[:, per] @ nn_row)


def _chiral_gram(md, sub, spec, gens: Sequence[ProductSector]) -> np.ndarray:
    ring, amb = md.ring, spec.ambichiral
    _, per = _sets(sub)
    lam = np.array([g.lam for g in gens])
    tau = np.array([g.other for g in gens])
    A = amb.fusion[np.array(amb.conj)[tau]][:, tau, :]        # [i, j, tau'']
    W = A @ spec.branching[:, per]                            # [i, j, rho]
    F = ring.fusion[lam][:, np.array(ring.conj)[lam], :][:, :, per]  # [i, j, rho]
    return np.einsum("ijr,ijr->ij", W, F).astype(np.int64)


def _full_gram(md, sub, Z, gens: Sequence[ProductSector]) -> np.ndarray:
    ring = md.ring
    N = ring.fusion
    c = np.array(ring.conj)
    deg, per = _sets(sub)
    lam = np.array([g.lam for g in gens])
    mu = np.array([g.other for g in gens])
    zdeg = np.array([Z[r, 0] for r in deg])
    inner = N[np.ix_(per, per, deg)] @ zdeg                   # [nu, xi]
    # left[j, i, nu] = N^nu_{conj lam_j, lam_i}; right[j, i, xi] = N^xi_{mu_j, conj mu_i}
    left = N[c[lam]][:, lam, :][:, :, per]
    right = N[mu][:, c[mu], :][:, :, per]
    G = np.einsum("jin,nx,jix->ij", left, inner, right)
    return G.astype(np.int64)


# --------------------------------------------------------------------------
# systems


def upsilon_index_ratio(md: ModularData, sub: Subsystem, Z: np.ndarray) -> float:
    d = md.ring.dims
    deg, _ = _sets(sub)
    return float(np.sum(d[deg] * Z[deg, 0]) / np.sum(d[deg] ** 2))


def as_fraction(x: float, tol: float = 1e-9, max_den: int = 1000) -> Fraction:
    f = Fraction(x).limit_denominator(max_den)
    if abs(float(f) - x) > tol:
        raise DoubleError(f"{x!r} is not a small rational")
    return f


def generator_name(ring: FusionRing, spec: InclusionSpec | None, kind: str, lam: int, other: int) -> str:
    lname = ring.labels[lam].name
    if kind == "chiral":
        tname = spec.ambichiral.labels[other].name
        if ring.algebra == "su2":
            return f"({lname},{tname})"
        return f"({lname[1:-1]};{tname})"
    return f"[{lname};{ring.labels[other].name}]"


def generating_family(md: ModularData, sub: Subsystem, spec: InclusionSpec, mode: str = "chiral",
                      Z: np.ndarray | None = None) -> list[ProductSector]:
    """Product sectors generating the double system.

    chiral mode: alpha-inductions of subsystem members times colour-zero
    ambichirals when the Upsilon ratio is one; otherwise every label of the
    full ring times every ambichiral whose grade cancels the label's colour.
    full mode: all pairs of subsystem members.  Order is ambichiral-major.
    """
    ring = md.ring
    if Z is None:
        Z = modular_invariant_Z(spec)
    gens = []
    if mode == "chiral":
        amb = spec.ambichiral
        ratio = upsilon_index_ratio(md, sub, Z)
        if abs(ratio - 1) < 1e-9:
            pairs = [(l, t) for t in color_zero_ambichirals(spec) for l in sub.members]
        else:
            cols = ring.colors()
            pairs = [(l, t) for t in range(amb.rank) for l in range(ring.rank)
                     if (cols[l] + spec.ambi_grades[t]) % ring.n_colors == 0]
        for l, t in pairs:
            gens.append(ProductSector("chiral", int(l), int(t), float(ring.dims[l] * amb.dims[t]),
                                      generator_name(ring, spec, "chiral", l, t)))
    elif mode == "full":
        for l in sub.members:
            for m in sub.members:
                gens.append(ProductSector("full", int(l), int(m), float(ring.dims[l] * ring.dims[m]),
                                          generator_name(ring, spec, "full", l, m)))
    else:
        raise DoubleError(f"unknown mode {mode!r}")
    return gens


def build_gram(md: ModularData, sub: Subsystem, spec: InclusionSpec | None,
               generators: Sequence[ProductSector], Z: np.ndarray | None = None,
               name: str = "") -> SectorSystem:
    gens = list(generators)
    kinds = {g.kind for g in gens}
    if len(kinds) > 1:
        raise DoubleError("generators mix chiral and full products; run the two doubles separately")
    if len({(g.kind, g.lam, g.other) for g in gens}) != len(gens):
        raise DoubleError("generators must be distinct")
    kind = kinds.pop() if kinds else "chiral"
    if Z is None:
        if spec is None:
            raise DoubleError("a modular invariant or an inclusion spec is required")
        Z = modular_invariant_Z(spec)
    if not gens:
        G = np.zeros((0, 0), dtype=np.int64)
    elif kind == "chiral":
        if spec is None:
            raise DoubleError("chiral pairings need an inclusion spec")
        G = _chiral_gram(md, sub, spec, gens)
    else:
        G = _full_gram(md, sub, Z, gens)
    return SectorSystem(name or (spec.name if spec else md.ring.title), kind, gens, G)


def resolve_sectors(system: SectorSystem, target_global_index: float | None,
                    rtol: float = INDEX_RTOL) -> SectorSystem:
    """Split the generating family into irreducibles.

    The Gram matrix is factored as B B^T over the non-negative integers.
    Irreducible dimensions are the minimum-norm solution of B d = generator
    dims, which splits a generator evenly among interchangeable pieces; the
    certificate compares their squared sum with the target global index.
    """
    G = system.gram
    if not np.array_equal(G, G.T) or np.any(G < 0):
        raise DoubleError("inconsistent Gram matrix: not symmetric non-negative")
    if len(G) and np.any(np.diag(G) < 1):
        raise DoubleError("inconsistent Gram matrix: zero diagonal entry")
    try:
        sols = factor_gram(G, max_solutions=3)
    except GramError as exc:
        raise DoubleError(f"inconsistent Gram matrix: {exc}") from None
    if not sols:
        raise DoubleError("inconsistent Gram matrix: no non-negative integer factorization")
    gdims = np.array([g.dim for g in system.generators])
    surviving = []
    for B in sols:
        B = canonical_columns(B)
        x = min_norm_dims(B, gdims)
        if np.any(x <= 0) or np.abs(B @ x - gdims).max() > 1e-8 * max(1.0, gdims.max()):
            continue
        surviving.append((B, x))
    if not surviving:
        raise DoubleError("no factorization admits positive irreducible dimensions")
    if target_global_index is not None and len(surviving) > 1:
        close = [(B, x) for B, x in surviving
                 if abs(np.sum(x ** 2) - target_global_index) < rtol * target_global_index]
        if close:
            surviving = close
    if len(surviving) > 1:
        shapes = [B.shape[1] for B, _ in surviving]
        raise AmbiguousFactorization(f"ambiguous factorization: {len(surviving)} candidates with "
                                     f"{shapes} irreducibles", shapes)
    B, x = surviving[0]

    irreducibles = []
    first = [int(np.flatnonzero(B[:, c])[0]) for c in range(B.shape[1])]
    for c in range(B.shape[1]):
        g = first[c]
        siblings = [cc for cc in range(B.shape[1]) if first[cc] == g]
        base = system.generators[g].name
        name = base if len(siblings) == 1 else f"{base}_{siblings.index(c) + 1}"
        share = as_fraction(float(x[c] / gdims[g]), tol=1e-9, max_den=64)
        content = [(int(i), int(B[i, c])) for i in np.flatnonzero(B[:, c])]
        irreducibles.append(Irreducible(name, float(x[c]), share, content))

    cert = Report(f"global index certificate {system.name}")
    achieved = float(np.sum(x ** 2))
    cert.add("gram_factorization", np.array_equal(B @ B.T, G), f"{B.shape[1]} irreducibles")
    cert.add("dimension_conservation", np.abs(B @ x - gdims).max() < 1e-8 * max(1.0, gdims.max()))
    if target_global_index is not None:
        gap = abs(achieved - target_global_index) / target_global_index
        cert.add("global_index", gap < rtol,
                 f"achieved {achieved:.12g}, target {target_global_index:.12g}, relative gap {gap:.2e}")
    else:
        cert.add("global_index", True, f"achieved {achieved:.12g}; no target index available")
    return replace(system, B=B, irreducibles=irreducibles, certificate=cert,
                   target_index=target_global_index)


def double_target_index(spec: InclusionSpec, chiral_dims: np.ndarray, delta: Sequence[int]) -> float:
    """[[D(Delta)]] = [[Delta]]^2 for Delta the colour-zero chiral vertices."""
    idx = float(np.sum(np.asarray(chiral_dims)[list(delta)] ** 2))
    return idx * idx


# --------------------------------------------------------------------------
# non-degenerate specializations


def canonical_multiplicities(spec: InclusionSpec, md: ModularData, sub: Subsystem, mode: str = "chiral"):
    """Multiplicity table of the canonical endomorphism in the non-degenerate case.

    Returns (table, sanity) where sanity is the dimension-weighted sum of
    the table.
    """
    ring = md.ring
    if not is_nondegenerate(md) or len(sub.members) != ring.rank:
        raise DoubleError("formula valid only in non-degenerate case")
    d = ring.dims
    if mode == "full":
        table = modular_invariant_Z(spec)
        sanity = float(d @ table @ d)
    elif mode == "chiral":
        table = spec.branching.T.copy()
        sanity = float(d @ table @ spec.ambichiral.dims)
    else:
        raise DoubleError(f"unknown mode {mode!r}")
    return table, sanity


def nondegenerate_product_check(md: ModularData, spec: InclusionSpec, sub: Subsystem,
                                sample: int | None = None, seed: int = 0) -> Report:
    """Both Gram matrices reduce to identities when the full system is non-degenerate."""
    rep = Report(f"non-degenerate collapse {spec.name}")
    ring = md.ring
    if not is_nondegenerate(md) or len(sub.members) != ring.rank or list(sub.deg) != [ring.identity]:
        rep.add("applicable", False, "degenerate: the Kronecker collapse does not apply")
        return rep
    Z = modular_invariant_Z(spec)
    labels = list(range(ring.rank))
    rng = np.random.default_rng(seed)
    if sample is not None and sample < ring.rank ** 2:
        flat = rng.choice(ring.rank ** 2, size=sample, replace=False)
        pairs = [(int(i) // ring.rank, int(i) % ring.rank) for i in sorted(flat)]
    else:
        pairs = [(a, b) for a in labels for b in labels]
    full = [ProductSector("full", a, b, float(ring.dims[a] * ring.dims[b])) for a, b in pairs]
    G = _full_gram(md, sub, Z, full)
    off = np.argwhere(G != np.eye(len(full), dtype=np.int64))
    rep.add("full_identity", len(off) == 0, f"{len(full)} pairs",
            None if not len(off) else (pairs[off[0][0]], pairs[off[0][1]]))
    amb = spec.ambichiral
    chiral = [ProductSector("chiral", l, t, float(ring.dims[l] * amb.dims[t]))
              for t in range(amb.rank) for l in labels]
    if sample is not None and sample < len(chiral):
        idx = sorted(rng.choice(len(chiral), size=sample, replace=False).tolist())
        chiral = [chiral[i] for i in idx]
    G = _chiral_gram(md, sub, spec, chiral)
    off = np.argwhere(G != np.eye(len(chiral), dtype=np.int64))
    rep.add("chiral_identity", len(off) == 0, f"{len(chiral)} products",
            None if not len(off) else (off[0][0], off[0][1]))
    return rep
