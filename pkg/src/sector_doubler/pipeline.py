"""End-to-end analysis of one inclusion descriptor."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import double_engine as de
from .double_engine import SectorSystem
from .graph_emit import BipartiteGraph, dual_principal_graph
from .inclusion_data import (
    ChiralData, InclusionSpec, chiral_global_index_check, chiral_multiplicities,
    delta_vertices, derive_ambichiral_action, load_inclusion, modular_invariant_Z,
    resolve_spec_path, validate_Z,
)
from .modular_data import ModularData, Subsystem, color_zero_subsystem, standard_modular
from .report import Report

FULL_MODE_MAX_GENERATORS = 2000


@dataclass
class Analysis:
    spec: InclusionSpec
    md: ModularData
    sub: Subsystem
    Z: np.ndarray
    chiral: ChiralData
    delta: list[int]
    mode: str
    upsilon: float
    system: SectorSystem
    checks: Report
    graph: BipartiteGraph | None = None
    candidates: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        ok = self.checks.ok
        if self.system.certificate is not None:
            ok = ok and self.system.certificate.ok
        return ok


def chiral_setup(spec: InclusionSpec) -> ChiralData:
    return derive_ambichiral_action(spec, chiral_multiplicities(spec))


def analyze(spec_or_name, mode: str = "chiral", index_rtol: float = de.INDEX_RTOL) -> Analysis:
    """Analysis of a descriptor; results for files are cached on (path, mtime, mode, tolerance)."""
    if isinstance(spec_or_name, InclusionSpec):
        return _analyze(spec_or_name, mode, index_rtol)
    path = resolve_spec_path(spec_or_name)
    return _analyze_cached(str(path.resolve()), path.stat().st_mtime_ns, mode, index_rtol)


@lru_cache(maxsize=32)
def _analyze_cached(path: str, mtime: int, mode: str, index_rtol: float) -> Analysis:
    return _analyze(load_inclusion(Path(path)), mode, index_rtol)


def _analyze(spec: InclusionSpec, mode: str, index_rtol: float) -> Analysis:
    if mode not in ("chiral", "full"):
        raise de.DoubleError(f"unknown mode {mode!r}")
    md = standard_modular(spec.ring.algebra, spec.ring.level)
    sub = color_zero_subsystem(spec.ring).with_sets(md)
    Z = modular_invariant_Z(spec)
    checks = Report(f"analysis {spec.name}")
    checks.extend(validate_Z(spec, md, Z), "Z.")
    chiral = chiral_setup(spec)
    delta = delta_vertices(spec, chiral)
    checks.extend(chiral_global_index_check(spec, md, sub, chiral, Z), "chiral.")
    ratio = de.upsilon_index_ratio(md, sub, Z)
    gens = de.generating_family(md, sub, spec, mode, Z)
    if len(gens) > FULL_MODE_MAX_GENERATORS:
        raise de.DoubleError(f"{spec.name}: {len(gens)} product generators exceed the limit of "
                             f"{FULL_MODE_MAX_GENERATORS} for one Gram matrix")
    system = de.build_gram(md, sub, spec, gens, Z, name=f"{spec.name}-{mode}")
    if mode == "chiral":
        target = de.double_target_index(spec, chiral.chiral_dims, delta)
    elif list(sub.deg) == [spec.ring.identity]:
        idx = float(np.sum(spec.ring.dims[list(sub.members)] ** 2))
        target = idx * idx
    else:
        target = None
    candidates: list[int] = []
    try:
        system = de.resolve_sectors(system, target, rtol=index_rtol)
    except de.AmbiguousFactorization as exc:
        if mode == "chiral":
            raise
        # without a target index nothing singles out one factorization; report them all
        candidates = exc.shapes
    graph = dual_principal_graph(spec, chiral, system) if mode == "chiral" else None
    return Analysis(spec, md, sub, Z, chiral, delta, mode, ratio, system, checks, graph, candidates)


def summary(a: Analysis) -> dict:
    ring = a.spec.ring
    sys_ = a.system
    out = {
        "schema": "v1",
        "spec": a.spec.name,
        "title": a.spec.title,
        "mode": a.mode,
        "ring": {"algebra": ring.algebra, "level": ring.level, "labels": ring.rank,
                 "global_index": float(np.sum(ring.dims ** 2)), "central_charge": a.md.c},
        "branching": {a.spec.ambichiral.labels[l].name: ring.names(np.flatnonzero(a.spec.branching[l]))
                      for l in range(a.spec.ambichiral.rank)},
        "subsystem": a.sub.to_json(),
        "Z_validation": a.checks.to_json(),
        "upsilon_ratio": str(de.as_fraction(a.upsilon)),
        "chiral_vertices": a.spec.n_vertices,
        "delta": [a.spec.vertices[v] for v in a.delta],
        "generators": [g.name for g in sys_.generators],
        "gram": sys_.gram.tolist(),
        "irreducibles": [{"name": i.name, "dim": i.dim, "share": str(i.share)} for i in sys_.irreducibles],
        "n_irreducibles": len(sys_.irreducibles) if sys_.resolved else None,
        "resolved": sys_.resolved,
        "factorization_candidates": a.candidates,
        "splits": [[n, m] for n, m in sys_.splits()],
        "identifications": sys_.identifications(),
        "certificate": sys_.certificate.to_json() if sys_.certificate else None,
        "ok": a.ok,
    }
    return out


def summary_text(a: Analysis) -> str:
    s = summary(a)
    ring = a.spec.ring
    lines = [f"{a.spec.name}: {a.spec.title}  (mode {a.mode})",
             f"  ring {ring.title}: {ring.rank} labels, global index {s['ring']['global_index']:.10g}, "
             f"c = {a.md.c:.6g}"]
    lines.append("  branching:")
    for l, lams in s["branching"].items():
        lines.append(f"    tau_{l}: {', '.join(lams)}")
    lines.append(f"  colour-zero subsystem: {len(a.sub.members)} labels")
    lines.append(f"  deg = {{{', '.join(a.sub.names('deg'))}}}")
    lines.append(f"  per = {{{', '.join(a.sub.names('per'))}}}")
    for c in a.checks.checks:
        lines.append("  " + c.line())
    lines.append(f"  Upsilon ratio = {s['upsilon_ratio']}")
    lines.append(f"  Delta ({len(a.delta)} vertices): {', '.join(s['delta'])}")
    lines.append(f"  generators: {len(s['generators'])}")
    diag = np.diag(a.system.gram)
    big = [(g, int(d)) for g, d in zip(s["generators"], diag) if d > 1]
    if big:
        lines.append("  Gram diagonal > 1: " + ", ".join(f"{g}:{d}" for g, d in big))
    if not a.system.resolved:
        lines.append(f"  irreducibles: unresolved, integer factorizations with {a.candidates} pieces "
                     "and no target index to choose between them")
    else:
        lines.append(f"  irreducibles: {s['n_irreducibles']}")
    for irr in a.system.irreducibles:
        share = "" if irr.share == 1 else f"  ({irr.share} of generator)"
        lines.append(f"    {irr.name:<18} d = {irr.dim:.10g}{share}")
    if s["splits"]:
        lines.append("  splits: " + ", ".join(f"{n} into {m}" for n, m in s["splits"]))
    if s["identifications"]:
        lines.append(f"  identified classes: {len(s['identifications'])}")
    if a.system.certificate:
        for c in a.system.certificate.checks:
            lines.append("  " + c.line())
    if a.graph is not None:
        lines.append(f"  dual principal graph: {len(a.graph.top)} top, {len(a.graph.bottom)} bottom, "
                     f"{a.graph.n_edges()} edges")
    lines.append(f"  status: {'ok' if a.ok else 'FAILED'}")
    return "\n".join(lines) + "\n"
