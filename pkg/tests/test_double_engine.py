from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sector_doubler import double_engine as de
from sector_doubler.double_engine import ProductSector, SectorSystem
from sector_doubler.inclusion_data import load_inclusion
from sector_doubler.modular_data import color_zero_subsystem, full_subsystem, standard_modular
from sector_doubler.pipeline import analyze

SECTORS = {"e6": 10, "e8": 18, "e8cc": 14, "e12": 27, "e24": 62}


def setup(name, full=False):
    spec = load_inclusion(name)
    md = standard_modular(spec.ring.algebra, spec.ring.level)
    sub = (full_subsystem if full else color_zero_subsystem)(spec.ring).with_sets(md)
    return spec, md, sub, spec.branching.T @ spec.branching


@pytest.mark.parametrize("name,count", list(SECTORS.items()))
def test_sector_counts(name, count):
    a = analyze(name)
    assert len(a.system.irreducibles) == count
    assert a.system.certificate.ok


@pytest.mark.parametrize("name,splits", [
    ("e6", [("(5,1)", 2)]),
    ("e8", [("(14,0)", 2), ("(14,2)", 2)]),
    ("e8cc", []),
    ("e12", [("(6,3;0)", 3), ("(6,3;1)", 3), ("(6,3;2)", 3)]),
    ("e24", [("(14,7;0)", 3), ("(14,7;1)", 3)]),
])
def test_split_structure(name, splits):
    assert analyze(name).system.splits() == splits


@pytest.mark.parametrize("name", list(SECTORS))
def test_split_pieces_have_equal_dimension(name):
    sys_ = analyze(name).system
    for irr in sys_.irreducibles:
        pieces = [o for o in sys_.irreducibles if o.representative == irr.representative]
        g = sys_.generators[irr.representative]
        assert irr.dim == pytest.approx(g.dim / len(pieces), rel=1e-9)
        assert irr.share == Fraction(1, len(pieces)) or len(pieces) == 1 and irr.share <= 1


@pytest.mark.parametrize("name", list(SECTORS))
def test_target_index_from_perron_vector(name):
    """[[Delta]]^2 with Delta's dimensions taken from an eigen-decomposition of the chiral graph."""
    a = analyze(name)
    A = a.spec.adjacency.astype(float)
    vals, vecs = np.linalg.eig(A)
    v = np.abs(vecs[:, np.argmax(vals.real)].real)
    v /= v[a.spec.id_vertex]
    want = float(np.sum(v[a.delta] ** 2)) ** 2
    got = sum(i.dim ** 2 for i in a.system.irreducibles)
    assert got == pytest.approx(want, rel=1e-8)


@pytest.mark.parametrize("name,ratio", [("e6", Fraction(1, 2)), ("e8", 1), ("e8cc", 1), ("e12", 1), ("e24", 1)])
def test_upsilon_ratio(name, ratio):
    spec, md, sub, Z = setup(name)
    d = spec.ring.dims
    deg = list(sub.deg)
    direct = sum(d[r] * Z[r, 0] for r in deg) / sum(d[r] ** 2 for r in deg)
    assert de.as_fraction(direct) == ratio
    assert de.as_fraction(de.upsilon_index_ratio(md, sub, Z)) == ratio


def test_e6_pairings():
    spec, md, sub, Z = setup("e6")
    assert de.pair_chiral(md, sub, spec, "5", "1", "5", "1") == 2
    assert de.pair_chiral(md, sub, spec, "1", "1", "9", "1") == 1
    assert de.pair_chiral(md, sub, spec, "3", "1", "7", "1") == 1
    for j in range(0, 11, 2):
        assert de.pair_chiral(md, sub, spec, str(j), "0", str(10 - j), "2") == 1
    assert de.pair_ambi_alpha(md, sub, spec, "2", "10") == 1


def test_e8_and_e12_self_pairings():
    spec, md, sub, Z = setup("e8")
    assert de.pair_same_sign(md, sub, Z, "14", "14") == 2
    spec, md, sub, Z = setup("e12")
    assert de.pair_same_sign(md, sub, Z, "(6,3)", "(6,3)") == 3


def test_mixed_sign_vanishes_outside_permutant():
    spec, md, sub, Z = setup("e8cc")
    assert de.pair_mixed_sign(md, sub, Z, "(2,1)", "(2,1)") == 0
    assert de.pair_mixed_sign(md, sub, Z, "(5,0)", "(5,0)") == 1


@pytest.mark.parametrize("name", ["e6", "e8cc"])
def test_nondegenerate_collapse(name):
    spec, md, sub, _ = setup(name, full=True)
    rep = de.nondegenerate_product_check(md, spec, sub)
    assert rep.ok, rep.text()


def test_collapse_not_claimed_for_degenerate_subsystem():
    spec, md, sub, _ = setup("e6")
    rep = de.nondegenerate_product_check(md, spec, sub)
    assert not rep.ok
    assert rep.failures()[0].name == "applicable"


def test_canonical_multiplicities_only_nondegenerate():
    spec, md, sub, Z = setup("e8cc", full=True)
    table, sanity = de.canonical_multiplicities(spec, md, sub, "full")
    assert np.array_equal(table, Z)
    d = spec.ring.dims
    assert sanity == pytest.approx(float(d @ Z @ d))
    spec, md, sub, _ = setup("e6")
    with pytest.raises(de.DoubleError):
        de.canonical_multiplicities(spec, md, sub)


def test_full_mode_nondegenerate_is_product():
    a = analyze("e8cc", "full")
    n = len(a.sub.members)
    assert len(a.system.irreducibles) == n * n
    assert a.system.certificate.ok


def test_full_mode_degenerate_has_no_target():
    a = analyze("e6", "full")
    assert a.system.target_index is None
    assert len(a.system.irreducibles) == 18
    b = analyze("e8", "full")
    assert not b.system.resolved and len(b.candidates) >= 2


def test_mixed_generators_rejected():
    spec, md, sub, Z = setup("e6")
    gens = [ProductSector("chiral", 0, 0, 1.0), ProductSector("full", 0, 0, 1.0)]
    with pytest.raises(de.DoubleError, match="mix"):
        de.build_gram(md, sub, spec, gens, Z)


def test_duplicate_generators_rejected():
    spec, md, sub, Z = setup("e6")
    gens = [ProductSector("chiral", 0, 0, 1.0)] * 2
    with pytest.raises(de.DoubleError, match="distinct"):
        de.build_gram(md, sub, spec, gens, Z)


def test_unknown_mode():
    spec, md, sub, Z = setup("e6")
    with pytest.raises(de.DoubleError):
        de.generating_family(md, sub, spec, "both", Z)


def test_ambiguous_factorization_needs_target():
    gens = [ProductSector("full", 0, 0, 4.0)]
    sys_ = SectorSystem("toy", "full", gens, np.array([[4]]))
    with pytest.raises(de.AmbiguousFactorization) as exc:
        de.resolve_sectors(sys_, None)
    assert sorted(exc.value.shapes) == [1, 4]
    # one piece of dimension 2 or four of dimension 1: both have index 4, so a target cannot decide
    with pytest.raises(de.AmbiguousFactorization):
        de.resolve_sectors(sys_, 4.0)


def test_inconsistent_gram_rejected():
    gens = [ProductSector("full", 0, 0, 1.0), ProductSector("full", 0, 1, 1.0)]
    sys_ = SectorSystem("toy", "full", gens, np.array([[1, 1], [0, 1]]))
    with pytest.raises(de.DoubleError, match="inconsistent"):
        de.resolve_sectors(sys_, None)


def test_certificate_fails_with_wrong_target():
    a = analyze("e6")
    bad = de.resolve_sectors(de.build_gram(a.md, a.sub, a.spec, a.system.generators, a.Z), 100.0)
    assert not bad.certificate.ok


def test_as_fraction():
    assert de.as_fraction(0.5) == Fraction(1, 2)
    with pytest.raises(de.DoubleError):
        de.as_fraction(np.pi)


def test_system_json():
    doc = analyze("e6").system.to_json()
    assert doc["schema"] == "v1"
    assert len(doc["irreducibles"]) == 10


# ---------------------------------------------------------------------------
# properties: vectorized Gram builders against the scalar formulas


@settings(max_examples=25)
@given(st.sampled_from(["e6", "e8", "e8cc", "e12"]), st.data())
def test_chiral_gram_matches_scalar_formula(name, data):
    spec, md, sub, Z = setup(name)
    amb = spec.ambichiral
    pick = st.tuples(st.sampled_from(list(sub.members)), st.integers(0, amb.rank - 1))
    pairs = data.draw(st.lists(pick, min_size=1, max_size=6, unique=True))
    gens = [ProductSector("chiral", l, t, float(spec.ring.dims[l] * amb.dims[t])) for l, t in pairs]
    G = de.build_gram(md, sub, spec, gens, Z).gram
    for i, (l, t) in enumerate(pairs):
        for j, (m, u) in enumerate(pairs):
            assert G[i, j] == de.pair_chiral(md, sub, spec, l, t, m, u)
    assert np.array_equal(G, G.T)
    assert np.all(np.diag(G) >= 1)
    assert np.all(G * G <= np.outer(np.diag(G), np.diag(G)))      # Cauchy-Schwarz


@settings(max_examples=25)
@given(st.sampled_from(["e6", "e8cc", "e12"]), st.data())
def test_full_gram_matches_scalar_formula(name, data):
    spec, md, sub, Z = setup(name)
    pick = st.tuples(st.sampled_from(list(sub.members)), st.sampled_from(list(sub.members)))
    pairs = data.draw(st.lists(pick, min_size=1, max_size=6, unique=True))
    d = spec.ring.dims
    gens = [ProductSector("full", l, m, float(d[l] * d[m])) for l, m in pairs]
    G = de.build_gram(md, sub, spec, gens, Z).gram
    for i, (l, m) in enumerate(pairs):
        for j, (l2, m2) in enumerate(pairs):
            assert G[i, j] == de.pair_full(md, sub, Z, l, m, l2, m2)
    assert np.array_equal(G, G.T)


@settings(max_examples=20)
@given(st.sampled_from(["e6", "e8", "e12"]), st.data())
def test_same_sign_pairing_is_deg_sum(name, data):
    spec, md, sub, Z = setup(name)
    l = data.draw(st.sampled_from(list(sub.members)))
    m = data.draw(st.sampled_from(list(sub.members)))
    want = sum(int(spec.ring.fusion[r, l, m]) * int(Z[r, 0]) for r in sub.deg)
    assert de.pair_same_sign(md, sub, Z, l, m) == want
    assert de.pair_same_sign(md, sub, Z, l, m) == de.pair_same_sign(md, sub, Z, m, l)
