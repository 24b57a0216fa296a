"""Quantum double sector systems of alpha-induced systems from Verlinde fusion data."""

from .fusion_core import FusionRing, FusionRingError, build_ring, verify_ring
from .modular_data import ModularData, check_modular, color_zero_subsystem, standard_modular
from .inclusion_data import InclusionError, InclusionSpec, load_inclusion, validate_Z
from .double_engine import DoubleError, SectorSystem, build_gram, generating_family, resolve_sectors
from .graph_emit import BipartiteGraph, compare_golden, dual_principal_graph, emit_dot
from .pipeline import Analysis, analyze

__version__ = "0.1.0"

__all__ = [
    "Analysis", "BipartiteGraph", "DoubleError", "FusionRing", "FusionRingError", "InclusionError",
    "InclusionSpec", "ModularData", "SectorSystem", "analyze", "build_gram", "build_ring",
    "check_modular", "color_zero_subsystem", "compare_golden", "dual_principal_graph", "emit_dot",
    "generating_family", "load_inclusion", "resolve_sectors", "standard_modular", "validate_Z",
    "verify_ring",
]
