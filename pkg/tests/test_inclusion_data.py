import json
import shutil
from dataclasses import replace
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sector_doubler.inclusion_data import (
    BUILTIN, BUILTIN_FILES, InclusionError, check_chiral, chiral_global_index_check,
    chiral_multiplicities, data_dir, delta_vertices, derive_ambichiral_action, load_inclusion,
    modular_invariant_Z, spec_from_json, validate_Z, vertex_colors,
)
from sector_doubler.modular_data import color_zero_subsystem, standard_modular


def md_of(spec):
    return standard_modular(spec.ring.algebra, spec.ring.level)


def chiral_of(spec):
    return derive_ambichiral_action(spec, chiral_multiplicities(spec))


def dynkin(kind):
    """Simply laced Dynkin diagrams E6, E8 as networkx graphs (tree with a branch at node 2)."""
    n = {"E6": 6, "E8": 8}[kind]
    g = nx.path_graph(n - 1)
    g.add_edge(2, n - 1)
    return g


@pytest.mark.parametrize("name", BUILTIN)
def test_bundled_specs_load_and_commute(name):
    spec = load_inclusion(name)
    rep = validate_Z(spec, md_of(spec))
    assert rep.ok, rep.text()
    Z = modular_invariant_Z(spec)
    assert np.array_equal(Z, spec.branching.T @ spec.branching)
    assert Z[0, 0] == 1


@pytest.mark.parametrize("name,diagram", [("e6", "E6"), ("e8", "E8")])
def test_su2_chiral_graphs_are_dynkin_diagrams(name, diagram):
    spec = load_inclusion(name)
    A = spec.adjacency
    g = nx.Graph()
    g.add_nodes_from(range(spec.n_vertices))
    g.add_edges_from((int(v), int(w)) for w, v in np.argwhere(A))
    assert nx.is_isomorphic(g, dynkin(diagram))


@pytest.mark.parametrize("name,count", [("e6", 6), ("e8", 8), ("e8cc", 12), ("e12", 12), ("e24", 24)])
def test_chiral_vertex_counts(name, count):
    assert load_inclusion(name).n_vertices == count


@pytest.mark.parametrize("name", BUILTIN)
def test_chiral_dims_are_perron_vector(name):
    spec = load_inclusion(name)
    chiral = chiral_of(spec)
    A = spec.adjacency.astype(float)
    vals, vecs = np.linalg.eig(A)
    top = np.argmax(vals.real)
    v = np.abs(vecs[:, top].real)
    v /= v[spec.id_vertex]
    assert vals[top].real == pytest.approx(spec.ring.dims[spec.fundamental], rel=1e-9)
    assert np.allclose(chiral.chiral_dims, v, rtol=1e-8)


@pytest.mark.parametrize("name", BUILTIN)
def test_chiral_checks_and_index_identity(name):
    spec = load_inclusion(name)
    md = md_of(spec)
    chiral = chiral_of(spec)
    assert check_chiral(spec, chiral).ok
    sub = color_zero_subsystem(spec.ring).with_sets(md)
    assert chiral_global_index_check(spec, md, sub, chiral, modular_invariant_Z(spec)).ok


@pytest.mark.parametrize("name,delta", [
    ("e6", {"0", "2", "10"}),
    ("e8", {"0", "2", "4", "6^{(1)}"}),
    ("e8cc", {"(0,0)", "(5,4)", "(5,1)", "(3,0)^{(1)}"}),
    ("e12", {"(0,0)", "(2,1)", "tau_1", "tau_2"}),
])
def test_colour_zero_chiral_vertices(name, delta):
    spec = load_inclusion(name)
    chiral = chiral_of(spec)
    assert {spec.vertices[v] for v in delta_vertices(spec, chiral)} == delta
    assert all(vertex_colors(spec, chiral)[v] == 0 for v in delta_vertices(spec, chiral))


def test_e24_branching_matches_conformal_weight_classes():
    """Rows are the labels with h in Z and with h = 3/4 mod 1."""
    spec = load_inclusion("e24")
    k = 21
    rows = [set(), set()]
    for lab in spec.ring.labels:
        p, q = lab.weight
        a, b = p - q, q
        h = Fraction(a * a + a * b + b * b + 3 * a + 3 * b, 3 * (k + 3))
        if h.denominator == 1:
            rows[0].add(lab.name)
        elif (h - Fraction(3, 4)).denominator == 1:
            rows[1].add(lab.name)
    for l in range(2):
        got = {spec.ring.labels[i].name for i in np.flatnonzero(spec.branching[l])}
        assert got == rows[l]
    assert set(np.unique(spec.branching)) == {0, 1}
    assert len(rows[0]) == len(rows[1]) == 12


def test_e12_misprinted_labels_fail_validation():
    """The literal (7,1), (7,7) entries do not give a modular invariant; (7,2), (7,5) do."""
    spec = load_inclusion("e12")
    ring = spec.ring
    b = spec.branching.copy()
    for l in (1, 2):
        b[l, ring.index("(7,2)")] = 0
        b[l, ring.index("(7,5)")] = 0
        b[l, ring.index("(7,1)")] = 1
        b[l, ring.index("(7,7)")] = 1
    rep = validate_Z(replace(spec, branching=b), md_of(spec))
    assert not rep.ok
    assert any(c.witness is not None for c in rep.failures())


@settings(max_examples=30)
@given(st.sampled_from(["e6", "e8", "e8cc", "e12"]), st.data())
def test_any_branching_corruption_is_detected(name, data):
    spec = load_inclusion(name)
    l = data.draw(st.integers(0, spec.branching.shape[0] - 1))
    lam = data.draw(st.integers(0, spec.ring.rank - 1))
    delta = data.draw(st.sampled_from([-1, 1, 2]))
    b = spec.branching.copy()
    if b[l, lam] + delta < 0:
        delta = 1
    b[l, lam] += delta
    rep = validate_Z(replace(spec, branching=b), md_of(spec))
    assert not rep.ok
    first = rep.failures()[0]
    assert first.name == "Z00" or first.witness is not None


def test_data_dir_override(tmp_path, monkeypatch):
    for f in BUILTIN_FILES.values():
        shutil.copy(data_dir() / f, tmp_path / f)
    doc = json.loads((tmp_path / BUILTIN_FILES["e6"]).read_text())
    doc["title"] = "overridden"
    (tmp_path / BUILTIN_FILES["e6"]).write_text(json.dumps(doc))
    monkeypatch.setenv("SECTOR_DOUBLER_DATA", str(tmp_path))
    assert data_dir() == tmp_path
    assert load_inclusion("e6").title == "overridden"


def test_parse_error_names_line(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{\n "schema": "v1",\n "algebra": su2\n}\n')
    with pytest.raises(InclusionError, match=r"broken.json: parse error at line 3"):
        load_inclusion(p)


def test_missing_field_is_named():
    doc = json.loads((data_dir() / BUILTIN_FILES["e6"]).read_text())
    del doc["branching"]
    with pytest.raises(InclusionError, match="branching"):
        spec_from_json(doc, source="mem.json")


def test_schema_required():
    doc = json.loads((data_dir() / BUILTIN_FILES["e6"]).read_text())
    doc["schema"] = "v0"
    with pytest.raises(InclusionError, match="schema"):
        spec_from_json(doc)


def test_off_grade_branching_rejected_on_load(tmp_path):
    doc = json.loads((data_dir() / BUILTIN_FILES["e6"]).read_text())
    doc["branching"].append(["0", "1", 1])          # label 1 is odd, row 0 is even
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(InclusionError, match="grades"):
        load_inclusion(p)


def test_unknown_builtin():
    with pytest.raises(InclusionError, match="built-ins"):
        load_inclusion("e7")


def test_spec_json_roundtrip():
    spec = load_inclusion("e8cc")
    doc = spec.to_json()
    assert doc["schema"] == "v1"
    back = spec_from_json(json.loads(json.dumps(doc)))
    assert np.array_equal(back.branching, spec.branching)
    assert np.array_equal(back.adjacency, spec.adjacency)
    assert back.vertices == spec.vertices
