"""Dual principal graphs of Longo-Rehren inclusions: construction, DOT output, golden comparison."""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from itertools import permutations
from pathlib import Path

import numpy as np

from .double_engine import SectorSystem
from .inclusion_data import ChiralData, InclusionSpec, delta_vertices
from .report import Report


class GraphError(ValueError):
    pass


@dataclass
class BipartiteGraph:
    top: list[str]
    bottom: list[str]
    edges: list[tuple[str, str, int]]
    name: str = ""
    top_dims: dict[str, float] = field(default_factory=dict)
    bottom_dims: dict[str, float] = field(default_factory=dict)

    def edge_counter(self) -> Counter:
        c: Counter = Counter()
        for t, b, m in self.edges:
            c[(t, b)] += m
        return c

    def n_edges(self) -> int:
        return sum(m for _, _, m in self.edges)

    def neighbours(self, top: str) -> dict[str, int]:
        return {b: m for t, b, m in self.edges if t == top}

    def degree(self, top: str) -> int:
        return sum(self.neighbours(top).values())

    def to_json(self) -> dict:
        return {
            "schema": "v1",
            "name": self.name,
            "top": list(self.top),
            "bottom": list(self.bottom),
            "edges": [{"top": t, "bottom": b, "mult": m} for t, b, m in self.edges],
        }


def _check_int_share(vec: np.ndarray, m: int, what: str) -> np.ndarray:
    if np.any(vec % m):
        raise GraphError(f"edge vector of {what} is not divisible by its {m} pieces; explicit split data needed")
    return vec // m


def dual_principal_graph(spec: InclusionSpec, chiral: ChiralData, system: SectorSystem,
                         balance_tol: float = 1e-8) -> BipartiteGraph:
    if system.kind != "chiral":
        raise GraphError("dual principal graphs are built from chiral product sectors")
    if not system.resolved:
        raise GraphError("sector system must be resolved first")
    if chiral.T is None:
        raise GraphError("ambichiral action required")
    delta = delta_vertices(spec, chiral)
    d = chiral.chiral_dims
    vecs = []
    for irr in system.irreducibles:
        g = system.generators[irr.representative]
        full = chiral.T[g.other] @ chiral.M[g.lam][:, spec.id_vertex]
        pieces = sum(1 for other in system.irreducibles if other.representative == irr.representative)
        vec = _check_int_share(full, pieces, g.name) if pieces > 1 else full
        if np.any(vec[[v for v in range(spec.n_vertices) if v not in delta]]):
            raise GraphError(f"{g.name} leaves the colour-zero chiral vertices")
        got = float(vec[delta] @ d[delta])
        if abs(got - irr.dim) > balance_tol * max(1.0, irr.dim):
            raise GraphError(f"Perron balance fails at {irr.name}: {got} != {irr.dim}")
        vecs.append(vec)
    # connected component of the identity vertex
    top_reach = {spec.id_vertex}
    bot_reach: set[int] = set()
    changed = True
    while changed:
        changed = False
        for i, vec in enumerate(vecs):
            if i not in bot_reach and any(vec[v] for v in top_reach):
                bot_reach.add(i)
                new = {int(v) for v in np.flatnonzero(vec)} - top_reach
                top_reach |= new
                changed = True
    top = [spec.vertices[v] for v in delta if v in top_reach]
    bottom_idx = sorted(bot_reach)
    bottom = [system.irreducibles[i].name for i in bottom_idx]
    edges = []
    for v in delta:
        if v not in top_reach:
            continue
        for i in bottom_idx:
            m = int(vecs[i][v])
            if m:
                edges.append((spec.vertices[v], system.irreducibles[i].name, m))
    return BipartiteGraph(top, bottom, edges, name=spec.name,
                          top_dims={spec.vertices[v]: float(d[v]) for v in delta if v in top_reach},
                          bottom_dims={system.irreducibles[i].name: system.irreducibles[i].dim
                                       for i in bottom_idx})


def check_balance(g: BipartiteGraph, tol: float = 1e-8) -> Report:
    rep = Report(f"Perron balance {g.name}")
    sums: dict[str, float] = {b: 0.0 for b in g.bottom}
    for t, b, m in g.edges:
        sums[b] += m * g.top_dims[t]
    bad = [b for b in g.bottom if abs(sums[b] - g.bottom_dims[b]) > tol * max(1.0, g.bottom_dims[b])]
    rep.add("bottom_balance", not bad, f"unbalanced: {bad[:4]}" if bad else "", bad[0] if bad else None)
    return rep


# --------------------------------------------------------------------------
# DOT


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_dot(g: BipartiteGraph) -> str:
    lines = [f"graph {_q(g.name or 'dual_principal')} {{"]
    if g.top or g.bottom:
        lines.append("  { rank=same;")
        for t in g.top:
            lines.append(f"    {_q('t:' + t)} [label={_q(t)}, shape=circle];")
        lines.append("  }")
        lines.append("  { rank=same;")
        for b in g.bottom:
            lines.append(f"    {_q('b:' + b)} [label={_q(b)}, shape=point, xlabel={_q(b)}];")
        lines.append("  }")
    for t, b, m in g.edges:
        attr = f" [count={m}, penwidth={m}]" if m > 1 else ""
        lines.append(f"  {_q('t:' + t)} -- {_q('b:' + b)}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"


_NODE = re.compile(r'^\s*"(t|b):((?:[^"\\]|\\.)*)" \[label=')
_EDGE = re.compile(r'^\s*"t:((?:[^"\\]|\\.)*)" -- "b:((?:[^"\\]|\\.)*)"(?: \[count=(\d+), penwidth=\d+\])?;')
_HEAD = re.compile(r'^graph "((?:[^"\\]|\\.)*)" \{')


def _unq(s: str) -> str:
    return s.replace('\\"', '"').replace("\\\\", "\\")


def parse_dot(text: str) -> BipartiteGraph:
    """Inverse of emit_dot (only the subset emit_dot produces)."""
    top, bottom, edges, name = [], [], [], ""
    for line in text.splitlines():
        if m := _HEAD.match(line):
            name = _unq(m.group(1))
        elif m := _NODE.match(line):
            (top if m.group(1) == "t" else bottom).append(_unq(m.group(2)))
        elif m := _EDGE.match(line):
            edges.append((_unq(m.group(1)), _unq(m.group(2)), int(m.group(3) or 1)))
    return BipartiteGraph(top, bottom, edges, name=name)


# --------------------------------------------------------------------------
# golden files


def load_golden(path) -> dict:
    doc = json.loads(Path(path).read_text())
    if doc.get("schema") != "v1":
        raise GraphError(f"{path}: golden file must carry schema v1")
    for key in ("top", "bottom", "edges"):
        if key not in doc:
            raise GraphError(f"{path}: golden file lacks {key!r}")
    return doc


_SPLIT = re.compile(r"^(.*)_(\d+)$")


def _split_base(name: str) -> tuple[str, int | None]:
    m = _SPLIT.match(name)
    if m:
        return m.group(1), int(m.group(2))
    return name, None


def compare_golden(g: BipartiteGraph, golden) -> Report:
    """Label-respecting comparison; split siblings name_1, name_2, ... may be permuted."""
    doc = golden if isinstance(golden, dict) else load_golden(golden)
    want: Counter = Counter()
    for e in doc["edges"]:
        want[(e["top"], e["bottom"])] += int(e["mult"])
    have = g.edge_counter()
    rep = Report(f"golden {doc.get('name', '')}")
    rep.add("top_vertices", sorted(g.top) == sorted(doc["top"]),
            f"computed {sorted(g.top)} vs golden {sorted(doc['top'])}")
    rep.add("bottom_count", len(g.bottom) == len(doc["bottom"]),
            f"computed {len(g.bottom)} vs golden {len(doc['bottom'])}")

    # group split siblings and try all renamings inside each group
    groups: dict[str, list[str]] = {}
    for b in g.bottom:
        base, idx = _split_base(b)
        if idx is not None:
            groups.setdefault(base, []).append(b)
    best = None
    names = sorted(groups)
    choices = [list(permutations(groups[n])) for n in names]

    def relabel(counter: Counter, mapping: dict) -> Counter:
        out: Counter = Counter()
        for (t, b), m in counter.items():
            out[(t, mapping.get(b, b))] += m
        return out

    def search(i: int, mapping: dict):
        nonlocal best
        if best is not None and not best[0] and not best[1]:
            return
        if i == len(names):
            cur = relabel(have, mapping)
            missing = want - cur
            extra = cur - want
            if best is None or len(missing) + len(extra) < len(best[0]) + len(best[1]):
                best = (missing, extra)
            return
        for perm in choices[i]:
            m2 = dict(mapping)
            for src, dst in zip(sorted(groups[names[i]]), perm):
                m2[src] = dst
            search(i + 1, m2)

    search(0, {})
    missing, extra = best
    detail = []
    if missing:
        detail.append("missing " + ", ".join(f"{t}--{b} x{m}" for (t, b), m in sorted(missing.items())))
    if extra:
        detail.append("extra " + ", ".join(f"{t}--{b} x{m}" for (t, b), m in sorted(extra.items())))
    rep.add("edges", not missing and not extra, "; ".join(detail) or f"{sum(want.values())} edges match",
            {"missing": sorted(missing.items()), "extra": sorted(extra.items())} if detail else None)
    return rep


# --------------------------------------------------------------------------
# principal graphs of alpha+_f(M) in M, and the static figure data


def principal_graph(spec: InclusionSpec, chiral: ChiralData) -> BipartiteGraph:
    """Bipartite graph of the fundamental action between colour-0 and colour-1 chiral vertices.

    Only the part connected to the identity vertex is kept.
    """
    from .inclusion_data import vertex_colors

    cols = vertex_colors(spec, chiral)
    A = spec.adjacency
    even = [v for v in range(spec.n_vertices) if cols[v] == 0]
    odd = [v for v in range(spec.n_vertices) if cols[v] == 1 % spec.ring.n_colors]
    reach_e, reach_o = {spec.id_vertex}, set()
    changed = True
    while changed:
        changed = False
        for v in list(reach_e):
            for w in odd:
                if A[w, v] and w not in reach_o:
                    reach_o.add(w)
                    changed = True
        for w in list(reach_o):
            for v in even:
                if A[w, v] and v not in reach_e:
                    reach_e.add(v)
                    changed = True
    top = [spec.vertices[v] for v in even if v in reach_e]
    bottom = [spec.vertices[w] for w in odd if w in reach_o]
    edges = [(spec.vertices[v], spec.vertices[w], int(A[w, v]))
             for v in even if v in reach_e for w in odd if w in reach_o and A[w, v]]
    return BipartiteGraph(top, bottom, edges, name=f"{spec.name}-principal")


def load_static(name: str) -> dict:
    from .inclusion_data import data_dir

    doc = json.loads((data_dir() / f"{name}.json").read_text())
    if doc.get("schema") != "v1":
        raise GraphError(f"{name}: static figure data must carry schema v1")
    return doc


def static_dot(doc: dict) -> str:
    """DOT rendering of a static figure (nodes named by their picture coordinates)."""
    def node(p):
        return _q(f"{p[0]},{p[1]}")

    lines = [f"graph {_q(doc['name'])} {{"]
    star = tuple(doc.get("star", ()))
    for p in doc["nodes"]:
        extra = ", xlabel=\"*\"" if tuple(p) == star else ""
        lines.append(f"  {node(p)} [shape=point, pos=\"{p[0]},{p[1]}!\"{extra}];")
    for a, b, m in doc["edges"]:
        attr = f" [count={m}, penwidth={m}]" if m > 1 else ""
        lines.append(f"  {node(a)} -- {node(b)}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"
