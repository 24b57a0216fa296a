"""Conformal-inclusion descriptors: branching rules, ambichiral fusion, chiral graphs.

A descriptor is stored as JSON.  ``load_inclusion`` validates it against the
fusion ring it refers to; ``chiral_multiplicities`` and
``derive_ambichiral_action`` rebuild the module actions of the N-N labels and
of the ambichiral labels on the chiral vertices from the graph alone.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .fusion_core import FusionRing, build_ring, make_ring
from .gram import factor_gram, canonical_columns
from .modular_data import ModularData, Subsystem
from .report import Report

BUILTIN = ("e6", "e8", "e8cc", "e12", "e24")
BUILTIN_FILES = {
    "e6": "e6_su2_10.json",
    "e8": "e8_su2_28.json",
    "e8cc": "e8cc_su3_5.json",
    "e12": "e12_su3_9.json",
    "e24": "e24_su3_21.json",
}
COMMUTE_TOL = 1e-8


class InclusionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class InclusionSpec:
    name: str
    title: str
    ambient: str
    ring: FusionRing
    ambichiral: FusionRing
    branching: np.ndarray          # b[l, lam]
    vertices: tuple[str, ...]
    adjacency: np.ndarray          # A[w, v] = multiplicity of w in alpha_f(v)
    id_vertex: int
    fundamental: int
    ambi_embed: tuple[int, ...]
    ambi_grades: tuple[int, ...]
    ambi_action: tuple[np.ndarray, ...] | None = None
    source: str = ""

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def vertex(self, name) -> int:
        if isinstance(name, (int, np.integer)):
            return int(name)
        try:
            return self.vertices.index(name)
        except ValueError:
            raise InclusionError(f"{self.name}: unknown chiral vertex {name!r}") from None

    def to_json(self) -> dict:
        amb = self.ambichiral
        edges = [[self.vertices[v], self.vertices[w], int(self.adjacency[w, v])]
                 for v in range(self.n_vertices) for w in range(self.n_vertices)
                 if self.adjacency[w, v]]
        out = {
            "schema": "v1",
            "name": self.name,
            "title": self.title,
            "ambient": self.ambient,
            "algebra": self.ring.algebra,
            "level": self.ring.level,
            "ambichiral": {
                "labels": [l.name for l in amb.labels],
                "fusion": [[amb.labels[a].name, amb.labels[b].name, amb.labels[c].name,
                            int(amb.fusion[a, b, c])]
                           for a, b, c in np.argwhere(amb.fusion)],
                "dims": [float(d) for d in amb.dims],
                "grades": list(self.ambi_grades),
            },
            "branching": [[amb.labels[l].name, self.ring.labels[lam].name, int(self.branching[l, lam])]
                          for l, lam in np.argwhere(self.branching)],
            "chiral_graph": {
                "vertices": list(self.vertices),
                "edges": edges,
                "id_vertex": self.vertices[self.id_vertex],
                "fundamental": self.ring.labels[self.fundamental].name,
            },
            "ambi_embed": [self.vertices[v] for v in self.ambi_embed],
        }
        if self.ambi_action is not None:
            out["ambi_action"] = [m.tolist() for m in self.ambi_action]
        return out


@dataclass(frozen=True, eq=False)
class ChiralData:
    M: np.ndarray                     # M[lam] acting on column vectors over vertices
    T: np.ndarray | None = None       # T[l]
    chiral_dims: np.ndarray | None = None

    def induced(self, lam: int) -> np.ndarray:
        """Vertex content of alpha_lam, i.e. the column of M_lam at the identity vertex."""
        return self.M[lam][:, 0]


# --------------------------------------------------------------------------
# loading


def data_dir() -> Path:
    env = os.environ.get("SECTOR_DOUBLER_DATA")
    if env:
        return Path(env)
    return Path(str(resources.files("sector_doubler") / "data"))


def resolve_spec_path(name_or_path) -> Path:
    key = str(name_or_path)
    if key in BUILTIN_FILES:
        return data_dir() / BUILTIN_FILES[key]
    p = Path(key)
    if p.exists():
        return p
    raise InclusionError(f"unknown inclusion {key!r}; built-ins are {', '.join(BUILTIN)}")


def load_inclusion(name_or_path) -> InclusionSpec:
    path = resolve_spec_path(name_or_path)
    text = path.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InclusionError(f"{path}: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    spec = spec_from_json(doc, source=str(path))
    rep = validate_spec(spec)
    if not rep.ok:
        raise InclusionError(f"{path}: invalid descriptor\n" + rep.text())
    return spec


def _field(doc: dict, key: str, where: str):
    if key not in doc:
        raise InclusionError(f"{where}: missing field {key!r}")
    return doc[key]


def spec_from_json(doc: dict, source: str = "<memory>") -> InclusionSpec:
    where = source
    if doc.get("schema") != "v1":
        raise InclusionError(f"{where}: field 'schema' must be 'v1'")
    algebra = _field(doc, "algebra", where)
    level = _field(doc, "level", where)
    try:
        ring = build_ring(algebra, int(level))
    except ValueError as exc:
        raise InclusionError(f"{where}: field 'algebra'/'level': {exc}") from None

    amb_doc = _field(doc, "ambichiral", where)
    amb_labels = [str(x) for x in _field(amb_doc, "labels", where + ": ambichiral")]
    apos = {n: i for i, n in enumerate(amb_labels)}
    na = len(amb_labels)
    fusion = np.zeros((na, na, na), dtype=np.int64)
    for entry in _field(amb_doc, "fusion", where + ": ambichiral"):
        try:
            a, b, c, m = entry
            fusion[apos[str(a)], apos[str(b)], apos[str(c)]] = int(m)
        except (KeyError, ValueError, TypeError):
            raise InclusionError(f"{where}: field 'ambichiral.fusion': bad entry {entry!r}") from None
    grades = tuple(int(g) for g in amb_doc.get("grades", [0] * na))
    try:
        amb = make_ring(f"ambichiral:{doc.get('name', '?')}", amb_labels, fusion,
                        colors=grades, n_colors=ring.n_colors)
    except ValueError as exc:
        raise InclusionError(f"{where}: field 'ambichiral.fusion': {exc}") from None
    if "dims" in amb_doc:
        given = np.asarray(amb_doc["dims"], dtype=float)
        if given.shape != amb.dims.shape or np.abs(given - amb.dims).max() > 1e-9:
            raise InclusionError(f"{where}: field 'ambichiral.dims' disagrees with the ambichiral fusion rules")

    b = np.zeros((na, ring.rank), dtype=np.int64)
    for entry in _field(doc, "branching", where):
        try:
            l, lam, v = entry
            b[apos[str(l)], ring.index(lam)] = int(v)
        except (KeyError, ValueError, TypeError):
            raise InclusionError(f"{where}: field 'branching': bad entry {entry!r}") from None

    g = _field(doc, "chiral_graph", where)
    vertices = tuple(str(v) for v in _field(g, "vertices", where + ": chiral_graph"))
    vpos = {v: i for i, v in enumerate(vertices)}
    if len(vpos) != len(vertices):
        raise InclusionError(f"{where}: field 'chiral_graph.vertices' has duplicates")
    nv = len(vertices)
    adj = np.zeros((nv, nv), dtype=np.int64)
    for entry in _field(g, "edges", where + ": chiral_graph"):
        try:
            v, w, m = entry
            adj[vpos[str(w)], vpos[str(v)]] += int(m)
        except (KeyError, ValueError, TypeError):
            raise InclusionError(f"{where}: field 'chiral_graph.edges': bad entry {entry!r}") from None
    try:
        id_vertex = vpos[str(_field(g, "id_vertex", where))]
        fundamental = ring.index(_field(g, "fundamental", where))
        embed = tuple(vpos[str(v)] for v in _field(doc, "ambi_embed", where))
    except (KeyError, ValueError) as exc:
        raise InclusionError(f"{where}: chiral graph markers: {exc}") from None
    action = None
    if "ambi_action" in doc:
        action = tuple(np.asarray(m, dtype=np.int64) for m in doc["ambi_action"])
    return InclusionSpec(
        name=str(doc.get("name", Path(source).stem)), title=str(doc.get("title", "")),
        ambient=str(doc.get("ambient", "")), ring=ring, ambichiral=amb, branching=b,
        vertices=vertices, adjacency=adj, id_vertex=id_vertex, fundamental=fundamental,
        ambi_embed=embed, ambi_grades=grades, ambi_action=action, source=source)


def validate_spec(spec: InclusionSpec) -> Report:
    rep = Report(f"descriptor {spec.name}")
    b = spec.branching
    rep.add("b00", b[0, 0] == 1, f"b[0][0] = {b[0, 0]}")
    empty = [spec.ambichiral.labels[l].name for l in range(b.shape[0]) if not b[l].any()]
    rep.add("rows_nonzero", not empty, f"empty rows {empty}" if empty else "")
    rep.add("b_nonnegative", bool(np.all(b >= 0)))
    rep.add("id_embed", spec.ambi_embed[0] == spec.id_vertex if spec.ambi_embed else False)
    rep.add("embed_size", len(spec.ambi_embed) == spec.ambichiral.rank)
    cols = spec.ring.colors()
    bad = [(spec.ambichiral.labels[l].name, spec.ring.labels[lam].name)
           for l, lam in np.argwhere(b) if cols[lam] != spec.ambi_grades[l]]
    rep.add("grades", not bad, f"branching entries off their ambichiral grade: {bad[:3]}" if bad else "",
            bad[0] if bad else None)
    return rep


def builtin_specs() -> list[InclusionSpec]:
    return [load_inclusion(n) for n in BUILTIN]


# --------------------------------------------------------------------------
# modular invariant


def modular_invariant_Z(spec: InclusionSpec) -> np.ndarray:
    Z = spec.branching.T @ spec.branching
    if Z[0, 0] != 1:
        raise InclusionError(f"{spec.name}: Z[0][0] = {Z[0, 0]}, expected 1")
    return Z


def validate_Z(spec: InclusionSpec, md: ModularData, Z: np.ndarray | None = None) -> Report:
    if Z is None:
        Z = spec.branching.T @ spec.branching
    Z = np.asarray(Z)
    rep = Report(f"modular invariant {spec.name}")
    rep.add("Z00", Z[0, 0] == 1, f"Z[0][0] = {Z[0, 0]}")
    neg = np.argwhere(Z < 0)
    rep.add("nonnegative_integer", len(neg) == 0 and np.issubdtype(Z.dtype, np.integer),
            witness=tuple(neg[0]) if len(neg) else None)
    for key, X in (("S", md.S), ("T", md.T)):
        C = Z @ X - X @ Z
        err = float(np.abs(C).max())
        wit = None
        if err >= COMMUTE_TOL:
            i, j = np.unravel_index(np.argmax(np.abs(C)), C.shape)
            wit = (spec.ring.labels[i].name, spec.ring.labels[j].name)
        rep.add(f"commutes_{key}", err < COMMUTE_TOL,
                f"|Z{key} - {key}Z|_inf = {err:.2e}" + (f" worst entry at {wit}" if wit else ""), wit)
    return rep


# --------------------------------------------------------------------------
# module actions on chiral vertices


def _generators(ring: FusionRing, fundamental: int) -> list[int]:
    gens = [fundamental]
    if ring.conj[fundamental] != fundamental:
        gens.append(ring.conj[fundamental])
    return gens


def chiral_multiplicities(spec: InclusionSpec, scope: Iterable[int] | None = None) -> ChiralData:
    """M_lam for every label, by the fusion recursion driven by the chiral graph.

    Labels are reached one at a time: whenever a known M_mu times the
    fundamental (or its conjugate) produces exactly one label whose matrix
    is still unknown, that matrix is obtained by subtraction.  Conjugate
    labels act by transposes.
    """
    ring = spec.ring
    n, nv = ring.rank, spec.n_vertices
    A = spec.adjacency
    f = spec.fundamental
    M = np.zeros((n, nv, nv), dtype=np.int64)
    known = np.zeros(n, dtype=bool)
    M[ring.identity] = np.eye(nv, dtype=np.int64)
    known[ring.identity] = True
    gen_mats = {f: A, ring.conj[f]: A.T}
    for g, mat in gen_mats.items():
        M[g] = mat
        known[g] = True
    progress = True
    while progress and not known.all():
        progress = False
        for mu in np.flatnonzero(known):
            for g, mat in gen_mats.items():
                row = ring.fusion[g, mu]
                unknown = [nu for nu in np.flatnonzero(row) if not known[nu]]
                if len(unknown) != 1:
                    continue
                nu = unknown[0]
                rest = sum((int(row[x]) * M[x] for x in np.flatnonzero(row) if x != nu),
                           np.zeros((nv, nv), dtype=np.int64))
                num = mat @ M[mu] - rest
                if np.any(num % row[nu]):
                    raise InclusionError(f"{spec.name}: graph is not a module over the fusion ring at this level "
                                         f"(non-integer entry for {ring.labels[nu].name})")
                M[nu] = num // row[nu]
                if np.any(M[nu] < 0):
                    raise InclusionError(f"{spec.name}: graph is not a module over the fusion ring at this level "
                                         f"(negative entry for {ring.labels[nu].name})")
                known[nu] = True
                cnu = ring.conj[nu]
                if not known[cnu]:
                    M[cnu] = M[nu].T
                    known[cnu] = True
                progress = True
    if not known.all():
        missing = ring.names(np.flatnonzero(~known))[:5]
        raise InclusionError(f"{spec.name}: recursion could not reach {missing}")
    dims = chiral_dims_from_graph(spec)
    if scope is not None:
        keep = sorted(set(int(s) for s in scope))
        mask = np.zeros(n, dtype=bool)
        mask[keep] = True
        M = np.where(mask[:, None, None], M, 0)
    M.setflags(write=False)
    return ChiralData(M=M, T=None, chiral_dims=dims)


def chiral_dims_from_graph(spec: InclusionSpec) -> np.ndarray:
    from .fusion_core import perron_vector

    A = spec.adjacency.astype(float)
    v = perron_vector(np.eye(spec.n_vertices) + A + A.T)
    return v / v[spec.id_vertex]


def check_chiral(spec: InclusionSpec, chiral: ChiralData, tol: float = 1e-9) -> Report:
    ring = spec.ring
    M = chiral.M
    rep = Report(f"chiral data {spec.name}")
    rep.add("M_id", np.array_equal(M[ring.identity], np.eye(spec.n_vertices, dtype=np.int64)))
    rep.add("M_fundamental", np.array_equal(M[spec.fundamental], spec.adjacency))
    # fusion-module property, checked through the generators (they generate the ring)
    wit = None
    for g in _generators(ring, spec.fundamental):
        lhs = np.einsum("ab,mbc->mac", M[g], M)
        rhs = np.einsum("mn,nac->mac", ring.fusion[g], M)
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            wit = (ring.labels[g].name, ring.labels[bad[0][0]].name)
            break
    rep.add("module_property", wit is None, "" if wit is None else f"M_g M_mu mismatch at {wit}", wit)
    d = chiral.chiral_dims
    err = np.abs(M.astype(float) @ d - ring.dims[:, None] * d[None, :]).max()
    rep.add("perron_M", err < tol * max(1.0, float(d.max()) * float(ring.dims.max())), f"residual {err:.2e}")
    if chiral.T is not None:
        amb = spec.ambichiral
        T = chiral.T
        rep.add("T_id", np.array_equal(T[0], np.eye(spec.n_vertices, dtype=np.int64)))
        rep.add("T_nonnegative", bool(np.all(T >= 0)))
        comm = all(np.array_equal(T[l] @ M[lam], M[lam] @ T[l])
                   for l in range(amb.rank) for lam in _generators(ring, spec.fundamental))
        rep.add("T_commutes_M", comm)
        prod = np.einsum("lab,mbc->lmac", T, T)
        want = np.einsum("lmk,kac->lmac", amb.fusion, T)
        rep.add("T_fusion", np.array_equal(prod, want))
        err = np.abs(T.astype(float) @ d - amb.dims[:, None] * d[None, :]).max()
        rep.add("perron_T", err < tol * max(1.0, float(d.max()) * float(amb.dims.max())), f"residual {err:.2e}")
        emb = all(T[l][:, spec.id_vertex].tolist() == np.eye(spec.n_vertices, dtype=int)[spec.ambi_embed[l]].tolist()
                  for l in range(amb.rank))
        rep.add("T_embedding", emb)
    # branching consistency: <tau_l, alpha_lam> = b[l][lam]
    content = M[:, :, spec.id_vertex]
    bb = content[:, list(spec.ambi_embed)].T
    bad = np.argwhere(bb != spec.branching)
    wit = None
    if len(bad):
        wit = (spec.ambichiral.labels[bad[0][0]].name, ring.labels[bad[0][1]].name)
    rep.add("branching_matches_graph", wit is None,
            "" if wit is None else f"<tau, alpha_lam> != b at {wit}", wit)
    return rep


def derive_ambichiral_action(spec: InclusionSpec, chiral: ChiralData) -> ChiralData:
    """The matrices T_l of right multiplication by the ambichiral tau_l.

    T_l commutes with every M_lam and tau_m tau_l = sum_k N_amb[m][l][k] tau_k,
    so T_l (M_lam e_{tau_m}) = sum_k N_amb[m][l][k] M_lam e_{tau_k}.  The
    vectors M_lam e_{tau_m} span the vertex space, hence T_l is the unique
    solution of this linear system.
    """
    amb = spec.ambichiral
    nv = spec.n_vertices
    emb = list(spec.ambi_embed)
    # P[:, (m, lam)] = M_lam e_{tau_m}
    P = np.concatenate([chiral.M[:, :, emb[m]].T for m in range(amb.rank)], axis=1).astype(float)
    if np.linalg.matrix_rank(P) < nv:
        raise InclusionError(f"{spec.name}: induced sectors do not span the chiral vertices")
    pinv = np.linalg.pinv(P)
    mats = []
    for l in range(amb.rank):
        Q = np.concatenate([sum(amb.fusion[m, l, k] * chiral.M[:, :, emb[k]].T for k in range(amb.rank))
                            for m in range(amb.rank)], axis=1).astype(float)
        X = Q @ pinv
        R = np.rint(X)
        if np.abs(X - R).max() > 1e-6 or np.any(R < 0) or np.abs(R @ P - Q).max() > 1e-6:
            raise InclusionError(f"{spec.name}: no non-negative integer action for tau {amb.labels[l].name}")
        mats.append(R.astype(np.int64))
    T = np.stack(mats)
    if spec.ambi_action is not None:
        given = np.stack(spec.ambi_action)
        if given.shape != T.shape or not np.array_equal(given, T):
            raise InclusionError(f"{spec.name}: supplied ambi_action violates the module constraints")
    T.setflags(write=False)
    out = ChiralData(M=chiral.M, T=T, chiral_dims=chiral.chiral_dims)
    rep = check_chiral(spec, out)
    if not rep.ok:
        raise InclusionError(f"{spec.name}: inconsistent ambichiral action\n" + rep.text())
    return out


def vertex_colors(spec: InclusionSpec, chiral: ChiralData) -> np.ndarray:
    """Color of each chiral vertex, read off any N-N label whose induction contains it."""
    content = chiral.M[:, :, spec.id_vertex]      # lam x vertex
    cols = spec.ring.colors()
    out = -np.ones(spec.n_vertices, dtype=np.int64)
    for v in range(spec.n_vertices):
        lams = np.flatnonzero(content[:, v])
        cs = set(cols[lams].tolist())
        if len(cs) != 1:
            raise InclusionError(f"{spec.name}: vertex {spec.vertices[v]} has mixed colors {sorted(cs)}")
        out[v] = cs.pop()
    return out


def delta_vertices(spec: InclusionSpec, chiral: ChiralData) -> list[int]:
    """Chiral vertices of color zero."""
    return [int(v) for v in np.flatnonzero(vertex_colors(spec, chiral) == 0)]


def color_zero_ambichirals(spec: InclusionSpec) -> list[int]:
    return [l for l, g in enumerate(spec.ambi_grades) if g == 0]


def chiral_global_index_check(spec: InclusionSpec, md: ModularData, sub: Subsystem,
                              chiral: ChiralData, Z: np.ndarray | None = None,
                              rtol: float = 1e-8) -> Report:
    if Z is None:
        Z = modular_invariant_Z(spec)
    d = spec.ring.dims
    deg = list(sub.deg)
    weight = float(np.sum(d[deg] * Z[deg, 0]))
    amb0 = color_zero_ambichirals(spec)
    idx_m0 = float(np.sum(spec.ambichiral.dims[amb0] ** 2))
    delta = delta_vertices(spec, chiral)
    idx_plus = float(np.sum(chiral.chiral_dims[delta] ** 2))
    idx_n = float(np.sum(d[list(sub.members)] ** 2))
    lhs = idx_m0
    rhs = weight * idx_plus ** 2 / idx_n
    rep = Report(f"chiral global index {spec.name}")
    rep.add("index_identity", abs(lhs - rhs) < rtol * max(abs(lhs), abs(rhs)),
            f"[[Y_M^0]] = {lhs:.12g}, weight*[[Y_M^+]]^2/[[Y_N]] = {rhs:.12g}")
    return rep


# --------------------------------------------------------------------------
# derivation of chiral graphs from branching data


def theta_gram(ring: FusionRing, Z: np.ndarray) -> np.ndarray:
    """<alpha_lam, alpha_mu> = sum_nu Z[nu, 0] N[nu][lam][mu]."""
    return np.einsum("n,nlm->lm", np.asarray(Z)[:, 0], ring.fusion)


def extended_gram(ring: FusionRing, ambichiral: FusionRing, branching: np.ndarray) -> np.ndarray:
    """Gram matrix of the products alpha_lam tau_l, rows ordered l-major.

    <alpha_lam tau_l, alpha_mu tau_m> = sum_k N_amb[m][conj l][k] sum_nu N[lam][conj mu][nu] b[k][nu].
    """
    b = np.asarray(branching)
    # P[k][lam][mu] = <alpha_lam, alpha_mu tau_k> = sum_nu N[lam][conj mu][nu] b[k][nu]
    Nbar = ring.fusion[:, list(ring.conj), :]
    P = np.einsum("lmn,kn->klm", Nbar, b)
    aconj = list(ambichiral.conj)
    W = ambichiral.fusion[:, aconj, :]              # W[m][l][k] = N_amb[m][conj l][k]
    G = np.einsum("mlk,kab->lamb", W, P)
    n, na = ring.rank, ambichiral.rank
    return G.reshape(na * n, na * n)


def derive_chiral_graph(ring: FusionRing, branching: np.ndarray, fundamental: int,
                        ambichiral: FusionRing | None = None):
    """Chiral vertices and fundamental adjacency from the branching matrix.

    The Gram matrix of the products alpha_lam tau_l (just the theta-Gram
    matrix when no ambichiral ring is given) is factored as B B^T over the
    non-negative integers; the columns are the chiral vertices.  The
    adjacency then solves A B^T = B^T (N_f^T acting on every tau block).
    Returns (B, A) with B in canonical column order; the first ring.rank
    rows of B are the vertex contents of the alpha_lam themselves.
    """
    b = np.asarray(branching)
    n = ring.rank
    if ambichiral is None:
        G = theta_gram(ring, b.T @ b)
        na = 1
    else:
        G = extended_gram(ring, ambichiral, b)
        na = ambichiral.rank
    sols = factor_gram(G, max_solutions=2)
    if not sols:
        raise InclusionError("Gram matrix has no non-negative integer factorization")
    if len(sols) > 1:
        raise InclusionError("Gram factorization is ambiguous")
    B = canonical_columns(sols[0])
    Bt = B.T.astype(float)
    if np.linalg.matrix_rank(Bt) < Bt.shape[0]:
        raise InclusionError("products alpha_lam tau_l do not separate the chiral vertices")
    Nf = np.kron(np.eye(na), ring.fusion[fundamental].T.astype(float))
    A = Bt @ Nf @ np.linalg.pinv(Bt)
    R = np.rint(A)
    if np.abs(A - R).max() > 1e-6 or np.any(R < 0):
        raise InclusionError("derived adjacency is not a non-negative integer matrix")
    return B, R.astype(np.int64)


def default_vertex_names(ring: FusionRing, B: np.ndarray, amb_cols: Sequence[int] = (),
                         amb_names: Sequence[str] | None = None) -> list[str]:
    """Name a vertex after the smallest label inducing exactly it, else "lam^{(i)}".

    Non-identity ambichirals without such a label are called "tau_l".
    """
    B = np.asarray(B)[:ring.rank]
    taus = {int(v): l for l, v in enumerate(amb_cols)}
    names = []
    for v in range(B.shape[1]):
        exact = [lam for lam in range(ring.rank)
                 if B[lam, v] == 1 and B[lam].sum() == 1]
        if exact:
            names.append(ring.labels[exact[0]].name)
            continue
        if taus.get(v):
            names.append(f"tau_{amb_names[taus[v]] if amb_names else taus[v]}")
            continue
        lam = int(np.flatnonzero(B[:, v])[0])
        parts = list(np.flatnonzero(B[lam]))
        names.append(f"{ring.labels[lam].name}^{{({parts.index(v) + 1})}}")
    return names


def ambichiral_columns(B: np.ndarray, branching: np.ndarray) -> list[int]:
    """Vertex of each tau_l: the column hit by alpha_id tau_l (row l * rank)."""
    B = np.asarray(B)
    b = np.asarray(branching)
    n = b.shape[1]
    out = []
    for l in range(b.shape[0]):
        if B.shape[0] > n:
            hits = [v for v in range(B.shape[1]) if B[l * n, v] == 1 and B[l * n].sum() == 1]
        else:
            hits = [v for v in range(B.shape[1]) if np.array_equal(B[:, v], b[l])]
        if len(hits) != 1 or not np.array_equal(B[:n, hits[0]], b[l]):
            raise InclusionError(f"ambichiral row {l} does not match a unique chiral vertex")
        out.append(hits[0])
    return out
