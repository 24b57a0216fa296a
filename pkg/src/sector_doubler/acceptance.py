"""The acceptance suite behind `sector-doubler verify`.

Each criterion is a function returning a Report; `names` restricts it to a
subset of the bundled inclusions (criteria that do not involve any of the
requested inclusions return an empty report).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from . import double_engine as de
from .fusion_core import verify_ring
from .graph_emit import compare_golden
from .inclusion_data import BUILTIN, InclusionError, load_inclusion, validate_Z
from .modular_data import check_modular, full_subsystem, standard_modular
from .pipeline import analyze
from .report import Report

RING_OF = {"e6": ("su2", 10), "e8": ("su2", 28), "e8cc": ("su3", 5), "e12": ("su3", 9), "e24": ("su3", 21)}
MODULAR_TOL = 1e-8
INDEX_TOL = 1e-8

# reference values stated for the examples
EXPECTED_DEG = {
    "e6": (["0", "10"], ["0", "10"]),
    "e8": (["0", "28"], None),
    "e12": (["(0,0)", "(9,0)", "(9,9)"], None),
    "e8cc": (["(0,0)"], None),
}
EXPECTED_UPSILON = {"e6": Fraction(1, 2), "e8": Fraction(1), "e8cc": Fraction(1),
                    "e12": Fraction(1), "e24": Fraction(1)}
# name -> (irreducibles, list of (pieces, how many generators split that way))
EXPECTED_SECTORS = {
    "e6": (10, {2: 1}),
    "e8": (18, {2: 2}),
    "e8cc": (14, {}),
    "e12": (27, {3: 3}),
    "e24": (62, {3: 2}),
}
GOLDENS = {"e6": "fig1", "e8": "fig2", "e8cc": "fig4"}
COLLAPSE = ("e6", "e8cc")


@dataclass
class SuiteResult:
    reports: dict[int, Report] = field(default_factory=dict)
    seconds: dict[int, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.reports.values())

    def lines(self) -> list[str]:
        out = []
        for k in sorted(self.reports):
            rep = self.reports[k]
            status = "PASS" if rep.ok else "FAIL"
            out.append(f"criterion {k}: {status}  ({len(rep.checks)} checks) {rep.title}")
            for c in rep.failures():
                out.append("    " + c.line())
        return out

    def to_json(self) -> dict:
        return {
            "schema": "v1",
            "ok": self.ok,
            "criteria": [{"criterion": k, "ok": self.reports[k].ok, "report": self.reports[k].to_json()}
                         for k in sorted(self.reports)],
        }


def _names(names) -> list[str]:
    return list(BUILTIN) if names is None else [n for n in BUILTIN if n in set(names)]


def _guard(rep: Report, name: str, fn):
    """Run fn; turn any library error into a failing check naming the inclusion."""
    try:
        return fn()
    except (InclusionError, de.DoubleError, ValueError) as exc:
        rep.add(f"{name}.error", False, str(exc))
        return None


def criterion_1(names=None) -> Report:
    rep = Report("modular data identities")
    for n in _names(names):
        algebra, level = RING_OF[n]
        md = standard_modular(algebra, level)
        rep.extend(check_modular(md, tol=MODULAR_TOL, full=True), f"{md.ring.title}.")
    return rep


def criterion_2(names=None) -> Report:
    rep = Report("degenerate sets and relative permutants")
    for n in _names(names):
        if n not in EXPECTED_DEG:
            continue
        a = _guard(rep, n, lambda: analyze(n))
        if a is None:
            continue
        deg_want, per_want = EXPECTED_DEG[n]
        deg = a.sub.names("deg")
        rep.add(f"{n}.deg", set(deg) == set(deg_want), f"computed {deg}, expected {deg_want}")
        if per_want is not None:
            per = a.sub.names("per")
            rep.add(f"{n}.per", set(per) == set(per_want), f"computed {per}, expected {per_want}")
    return rep


def criterion_3(names=None) -> Report:
    rep = Report("pairing spot values")
    wanted = _names(names)
    if "e6" in wanted:
        a = analyze("e6")
        md, sub, spec = a.md, a.sub, a.spec
        cases = [("<(5,t1),(5,t1)>", de.pair_chiral(md, sub, spec, "5", "1", "5", "1"), 2),
                 ("<(1,t1),(9,t1)>", de.pair_chiral(md, sub, spec, "1", "1", "9", "1"), 1),
                 ("<(3,t1),(7,t1)>", de.pair_chiral(md, sub, spec, "3", "1", "7", "1"), 1)]
        for j in range(0, 11, 2):
            cases.append((f"<({j},t0),({10 - j},t2)>",
                          de.pair_chiral(md, sub, spec, str(j), "0", str(10 - j), "2"), 1))
        cases.append(("<eta(a+_10),eta(t2)>", de.pair_ambi_alpha(md, sub, spec, "2", "10"), 1))
        for label, got, want in cases:
            rep.add(f"e6.{label}", got == want, f"{got} (expected {want})")
    if "e8" in wanted:
        a = analyze("e8")
        got = de.pair_same_sign(a.md, a.sub, a.Z, "14", "14")
        rep.add("e8.<a+_14,a+_14>", got == 2, f"{got} (expected 2)")
    if "e12" in wanted:
        a = analyze("e12")
        got = de.pair_same_sign(a.md, a.sub, a.Z, "(6,3)", "(6,3)")
        rep.add("e12.<a+_(6,3),a+_(6,3)>", got == 3, f"{got} (expected 3)")
    return rep


def criterion_4(names=None) -> Report:
    rep = Report("Upsilon index ratio")
    for n in _names(names):
        a = _guard(rep, n, lambda: analyze(n))
        if a is None:
            continue
        got = de.as_fraction(a.upsilon)
        rep.add(f"{n}.ratio", got == EXPECTED_UPSILON[n], f"{got} (expected {EXPECTED_UPSILON[n]})")
    return rep


def criterion_5(names=None) -> Report:
    rep = Report("sector counts and global index certificate")
    for n in _names(names):
        a = _guard(rep, n, lambda: analyze(n))
        if a is None:
            continue
        count, split_shape = EXPECTED_SECTORS[n]
        sys_ = a.system
        rep.add(f"{n}.count", len(sys_.irreducibles) == count,
                f"{len(sys_.irreducibles)} irreducibles (expected {count})")
        shape: dict[int, int] = {}
        for _, m in sys_.splits():
            shape[m] = shape.get(m, 0) + 1
        rep.add(f"{n}.splits", shape == split_shape, f"{sys_.splits()} (expected pieces {split_shape})")
        equal = True
        for irr in sys_.irreducibles:
            if irr.share != 1:
                g = sys_.generators[irr.representative]
                pieces = sum(1 for o in sys_.irreducibles if o.representative == irr.representative)
                equal &= abs(irr.dim - g.dim / pieces) < 1e-9 * g.dim
        rep.add(f"{n}.equal_pieces", equal, "split pieces carry equal shares of the generator dimension")
        cert = sys_.certificate
        gap = abs(sum(i.dim ** 2 for i in sys_.irreducibles) - a.system.target_index) / a.system.target_index
        rep.add(f"{n}.certificate", cert is not None and cert.ok and gap < INDEX_TOL,
                f"relative gap {gap:.2e}")
    return rep


def criterion_6(names=None) -> Report:
    from .graph_emit import load_static

    rep = Report("dual principal graph goldens")
    for n in _names(names):
        if n not in GOLDENS:
            continue
        a = _guard(rep, n, lambda: analyze(n))
        if a is None:
            continue
        golden = load_static(GOLDENS[n])
        rep.extend(compare_golden(a.graph, golden), f"{n}.{GOLDENS[n]}.")
    return rep


def criterion_7(names=None, sample: int | None = None) -> Report:
    rep = Report("non-degenerate Kronecker collapse")
    for n in _names(names):
        if n not in COLLAPSE:
            continue
        spec = load_inclusion(n)
        md = standard_modular(*RING_OF[n])
        sub = full_subsystem(spec.ring).with_sets(md)
        rep.extend(de.nondegenerate_product_check(md, spec, sub, sample=sample, seed=7), f"{n}.")
    return rep


def _corrupt_branching(spec, l, lam, value):
    b = spec.branching.copy()
    b[l, lam] = value
    return replace(spec, branching=b)


def criterion_8(names=None, fusion_samples: int = 40, seed: int = 11) -> Report:
    """Every branching entry is perturbed in turn; fusion entries are sampled."""
    rep = Report("negative controls")
    rng = np.random.default_rng(seed)
    for n in _names(names):
        spec = load_inclusion(n)
        md = standard_modular(*RING_OF[n])
        base = validate_Z(spec, md)
        rep.add(f"{n}.baseline", base.ok, "unperturbed branching validates")
        missed, unlocalized, tried = [], [], 0
        for l in range(spec.branching.shape[0]):
            for lam in range(spec.ring.rank):
                old = int(spec.branching[l, lam])
                for value in ({old + 1, 0} - {old}):
                    tried += 1
                    r = validate_Z(_corrupt_branching(spec, l, lam, value), md)
                    if r.ok:
                        missed.append((l, spec.ring.labels[lam].name, value))
                    elif all(c.witness is None for c in r.failures()) and r.failures()[0].name != "Z00":
                        unlocalized.append((l, spec.ring.labels[lam].name, value))
        rep.add(f"{n}.branching_detected", not missed, f"{tried} perturbations, undetected {missed[:3]}")
        rep.add(f"{n}.branching_witness", not unlocalized, f"without witness {unlocalized[:3]}")

        ring = spec.ring
        # the largest ring is checked on fewer samples: each verify_ring call there takes about a second
        k = fusion_samples if ring.rank <= 64 else max(2, fusion_samples // 20)
        missed, unlocalized = [], []
        for _ in range(k):
            a, b, c = (int(x) for x in rng.integers(0, ring.rank, size=3))
            N = ring.fusion.copy()
            N[a, b, c] += 1
            bad = replace(ring, fusion=N)
            r = verify_ring(bad)
            if r.ok:
                missed.append((a, b, c))
            elif r.failures()[0].witness is None:
                unlocalized.append((a, b, c))
        rep.add(f"{n}.fusion_detected", not missed, f"{k} sampled entries, undetected {missed[:3]}")
        rep.add(f"{n}.fusion_witness", not unlocalized, f"without witness {unlocalized[:3]}")
    return rep


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
            5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8}


def run_suite(names=None, criteria=None) -> SuiteResult:
    """Run the selected criteria; wall-clock times are kept out of the printed and JSON output."""
    res = SuiteResult()
    for k in criteria or sorted(CRITERIA):
        t0 = time.perf_counter()
        try:
            rep = CRITERIA[k](names)
        except (InclusionError, de.DoubleError, ValueError) as exc:
            rep = Report(f"criterion {k}")
            rep.add("error", False, str(exc))
        res.seconds[k] = time.perf_counter() - t0
        if rep.checks:
            res.reports[k] = rep
    return res


def file_checks(names=None) -> Report:
    """Load every requested descriptor and validate its modular invariant; failures name the file."""
    rep = Report("bundled data")
    for n in _names(names):
        try:
            spec = load_inclusion(n)
        except InclusionError as exc:
            rep.add(f"{n}.load", False, str(exc))
            continue
        algebra, level = spec.ring.algebra, spec.ring.level
        if (algebra, level) != RING_OF[n]:
            rep.add(f"{n}.ring", False, f"{spec.source}: ring {algebra}_{level}, expected {RING_OF[n]}")
            continue
        r = validate_Z(spec, standard_modular(algebra, level))
        detail = "" if r.ok else f"{spec.source}: " + "; ".join(c.line() for c in r.failures())
        rep.add(f"{n}.Z", r.ok, detail, spec.source if not r.ok else None)
    return rep

