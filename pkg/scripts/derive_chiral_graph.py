"""Build the bundled inclusion descriptors from their branching tables.

For each conformal inclusion the chiral graph is recovered from the
branching matrix alone: the theta-Gram matrix <alpha_lam, alpha_mu> is
factored over the non-negative integers, and the fundamental adjacency is
read off by solving the linear module relation.  The result is written to
src/sector_doubler/data/<file>.json.

Usage:  python3 scripts/derive_chiral_graph.py [--check]
With --check nothing is written; the script exits non-zero if a bundled
file differs from what it would write.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from sector_doubler.fusion_core import build_ring, make_ring
from sector_doubler.inclusion_data import (
    BUILTIN_FILES, ambichiral_columns, default_vertex_names, derive_chiral_graph,
    spec_from_json, chiral_multiplicities, derive_ambichiral_action, check_chiral,
)
from sector_doubler.modular_data import conformal_weights

DATA = Path(__file__).resolve().parents[1] / "src" / "sector_doubler" / "data"


def spec_from_json_amb(labels, fusion, grades, ring):
    pos = {x: i for i, x in enumerate(labels)}
    t = np.zeros((len(labels),) * 3, dtype=np.int64)
    for a, b, c, m in fusion:
        t[pos[a], pos[b], pos[c]] = m
    return make_ring("ambichiral", labels, t, colors=grades, n_colors=ring.n_colors)


def cyclic(n):
    labels = [str(i) for i in range(n)]
    fusion = [[str(a), str(b), str((a + b) % n), 1] for a in range(n) for b in range(n)]
    return labels, fusion


def e24_branching():
    """Rows for the E7 level-one inclusion.

    Every label with integral conformal weight goes to tau_0 and every label
    with weight 3/4 mod 1 to tau_1; derive_e24_branching.py shows this is the
    only 0/1 solution of b S = S_ext b.
    """
    ring = build_ring("su3", 21)
    h = conformal_weights("su3", 21)
    row0 = [ring.labels[i].name for i in range(ring.rank) if h[i].denominator == 1]
    row1 = [ring.labels[i].name for i in range(ring.rank) if (4 * h[i]).denominator == 1 and (4 * h[i]) % 4 == 3]
    return {"0": row0, "1": row1}


SOURCES = {
    "e6": dict(
        title="SU(2)_10 ⊂ SO(5)_1", ambient="SO(5)_1", algebra="su2", level=10,
        amb_labels=["0", "1", "2"],
        amb_fusion=[["0", x, x, 1] for x in "012"] + [["1", "0", "1", 1], ["2", "0", "2", 1],
                                                    ["1", "1", "0", 1], ["1", "1", "2", 1],
                                                    ["1", "2", "1", 1], ["2", "1", "1", 1],
                                                    ["2", "2", "0", 1]],
        branching={"0": ["0", "6"], "1": ["3", "7"], "2": ["4", "10"]},
        names={},
    ),
    "e8": dict(
        title="SU(2)_28 ⊂ (G2)_1", ambient="(G2)_1", algebra="su2", level=28,
        amb_labels=["0", "2"],
        amb_fusion=[["0", "0", "0", 1], ["0", "2", "2", 1], ["2", "0", "2", 1],
                    ["2", "2", "0", 1], ["2", "2", "2", 1]],
        branching={"0": ["0", "10", "18", "28"], "2": ["6", "12", "16", "22"]},
        names={"tau_2": "6^{(1)}"},
    ),
    "e8cc": dict(
        title="SU(3)_5 ⊂ SU(6)_1", ambient="SU(6)_1", algebra="su3", level=5,
        amb=cyclic(6),
        branching={"0": ["(0,0)", "(4,2)"], "1": ["(2,0)", "(5,3)"], "2": ["(3,1)", "(5,5)"],
                   "3": ["(3,0)", "(3,3)"], "4": ["(3,2)", "(5,0)"], "5": ["(2,2)", "(5,2)"]},
        names={"tau_3": "(3,0)^{(1)}"},
    ),
    "e12": dict(
        title="SU(3)_9 ⊂ (E6)_1", ambient="(E6)_1", algebra="su3", level=9,
        amb=cyclic(3),
        # the labels (7,2), (7,5) replace a (7,1), (7,7) misprint; see the decisions ledger
        branching={"0": ["(0,0)", "(5,1)", "(5,4)", "(8,4)", "(9,0)", "(9,9)"],
                   "1": ["(4,2)", "(7,2)", "(7,5)"], "2": ["(4,2)", "(7,2)", "(7,5)"]},
        names={},
    ),
    "e24": dict(
        title="SU(3)_21 ⊂ (E7)_1", ambient="(E7)_1", algebra="su3", level=21,
        amb=cyclic(2),
        branching=None,
        names={"(5,1)^{(3)}": "(5,1)^{(1)}"},
    ),
}


def build(name: str) -> dict:
    src = SOURCES[name]
    ring = build_ring(src["algebra"], src["level"])
    if "amb" in src:
        amb_labels, amb_fusion = src["amb"]
    else:
        amb_labels, amb_fusion = src["amb_labels"], src["amb_fusion"]
    rows = src["branching"] or e24_branching()
    b = np.zeros((len(amb_labels), ring.rank), dtype=np.int64)
    for l, lams in rows.items():
        for lam in lams:
            b[amb_labels.index(l), ring.index(lam)] = 1
    grades = []
    for l in range(len(amb_labels)):
        cols = {ring.labels[i].color for i in np.flatnonzero(b[l])}
        assert len(cols) == 1, (name, l, cols)
        grades.append(cols.pop())
    fund = ring.generators[0]
    amb_ring = spec_from_json_amb(amb_labels, amb_fusion, grades, ring)
    B, A = derive_chiral_graph(ring, b, fund, amb_ring)
    amb_cols = ambichiral_columns(B, b)
    names = default_vertex_names(ring, B, amb_cols, amb_labels)
    # a few vertices are renamed to the names used in the literature
    names = [src["names"].get(n, n) for n in names]
    edges = [[names[v], names[w], int(A[w, v])]
             for v in range(len(names)) for w in range(len(names)) if A[w, v]]
    doc = {
        "schema": "v1",
        "name": name,
        "title": src["title"],
        "ambient": src["ambient"],
        "algebra": src["algebra"],
        "level": src["level"],
        "ambichiral": {"labels": amb_labels, "fusion": amb_fusion, "grades": grades},
        "branching": [[l, ring.labels[lam].name, int(b[amb_labels.index(l), lam])]
                      for l in amb_labels for lam in np.flatnonzero(b[amb_labels.index(l)])],
        "chiral_graph": {"vertices": names, "edges": edges, "id_vertex": names[0],
                         "fundamental": ring.labels[fund].name},
        "ambi_embed": [names[v] for v in amb_cols],
    }
    spec = spec_from_json(doc)
    doc["ambichiral"]["dims"] = [round(float(d), 15) for d in spec.ambichiral.dims]
    chiral = derive_ambichiral_action(spec, chiral_multiplicities(spec))
    rep = check_chiral(spec, chiral)
    if not rep.ok:
        raise SystemExit(rep.text())
    return doc


def dump(doc: dict) -> str:
    return json.dumps(doc, indent=1, ensure_ascii=False) + "\n"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true")
    ap.add_argument("names", nargs="*", default=list(SOURCES))
    args = ap.parse_args(argv)
    status = 0
    for name in args.names:
        doc = build(name)
        path = DATA / BUILTIN_FILES[name]
        text = dump(doc)
        if args.check:
            same = path.exists() and path.read_text() == text
            print(f"{name}: {'up to date' if same else 'DIFFERS'}")
            status |= not same
        else:
            path.write_text(text)
            g = doc["chiral_graph"]
            print(f"{name}: {len(g['vertices'])} chiral vertices, {len(g['edges'])} edges -> {path.name}")
    return status


if __name__ == "__main__":
    sys.exit(main())
