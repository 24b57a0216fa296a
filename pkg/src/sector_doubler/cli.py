"""sector-doubler: command-line front end.

    sector-doubler examples
    sector-doubler analyze e6 --mode chiral --format text
    sector-doubler graph e8 --golden fig2.json
    sector-doubler verify --all

Exit status: 0 when every invariant and golden comparison passed, 1 when
one failed, 2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import acceptance
from .double_engine import INDEX_RTOL, DoubleError
from .fusion_core import FusionRingError
from .graph_emit import GraphError, check_balance, compare_golden, emit_dot, load_golden
from .inclusion_data import BUILTIN, BUILTIN_FILES, InclusionError, data_dir, load_inclusion
from .modular_data import ModularDataError
from .pipeline import analyze, summary, summary_text
from .report import Report

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

FORMATS = {
    "examples": ("text", "json"),
    "analyze": ("text", "json"),
    "graph": ("dot", "json", "text"),
    "verify": ("text", "json"),
}

_MODULE_OF = {
    FusionRingError: "fusion_core",
    ModularDataError: "modular_data",
    InclusionError: "inclusion_data",
    DoubleError: "double_engine",
    GraphError: "graph_emit",
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    spec: str | None = None
    mode: str = "chiral"
    format: str | None = None
    output: str | None = None
    golden: str | None = None
    all: bool = False
    index_rtol: float = INDEX_RTOL

    def __post_init__(self):
        if self.command not in FORMATS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.format is None:
            self.format = FORMATS[self.command][0]
        if self.format not in FORMATS[self.command]:
            raise UsageError(f"{self.command}: format must be one of {', '.join(FORMATS[self.command])}")
        if self.mode not in ("chiral", "full"):
            raise UsageError("mode must be chiral or full")
        if self.command in ("analyze", "graph") and not self.spec:
            raise UsageError(f"{self.command}: a built-in name or descriptor path is required")
        if self.command == "verify" and self.spec and self.all:
            raise UsageError("verify: give either a spec or --all")
        if self.golden and self.command != "graph":
            raise UsageError("--golden only applies to the graph command")
        if self.command == "graph" and self.mode != "chiral":
            raise UsageError("graph: dual principal graphs are built in chiral mode")
        if not self.index_rtol > 0:
            raise UsageError("tolerances must be positive")


def _dumps(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


# --------------------------------------------------------------------------
# commands; each returns (text, exit code)


def cmd_examples(cfg: RunConfig) -> tuple[str, int]:
    rows = []
    for name in BUILTIN:
        spec = load_inclusion(name)
        rows.append({
            "name": name,
            "title": spec.title,
            "algebra": spec.ring.algebra,
            "level": spec.ring.level,
            "ambient": spec.ambient,
            "labels": spec.ring.rank,
            "chiral_vertices": spec.n_vertices,
            "ambichiral": spec.ambichiral.rank,
            "file": BUILTIN_FILES[name],
        })
    if cfg.format == "json":
        return _dumps({"schema": "v1", "examples": rows}), EXIT_OK
    lines = [f"{r['name']}: {r['title']}  ({r['algebra']} level {r['level']}, ambient {r['ambient']}, "
             f"{r['labels']} labels, {r['chiral_vertices']} chiral vertices, {r['ambichiral']} ambichiral)"
             for r in rows]
    return "\n".join(lines) + "\n", EXIT_OK


def cmd_analyze(cfg: RunConfig) -> tuple[str, int]:
    a = analyze(cfg.spec, cfg.mode, cfg.index_rtol)
    code = EXIT_OK if a.ok else EXIT_FAIL
    if cfg.format == "json":
        return _dumps(summary(a)), code
    return summary_text(a), code


def _resolve_golden(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    q = data_dir() / p.name
    if q.exists():
        return q
    raise GraphError(f"golden file {path!r} not found (also looked in {data_dir()})")


def cmd_graph(cfg: RunConfig) -> tuple[str, int]:
    a = analyze(cfg.spec, "chiral", cfg.index_rtol)
    g = a.graph
    checks = Report(f"graph {a.spec.name}")
    checks.extend(check_balance(g))
    if cfg.golden:
        checks.extend(compare_golden(g, load_golden(_resolve_golden(cfg.golden))), "golden.")
    code = EXIT_OK if checks.ok and a.ok else EXIT_FAIL
    if cfg.format == "dot":
        text = emit_dot(g)
        if not checks.ok:
            sys.stderr.write(checks.text() + "\n")
    elif cfg.format == "json":
        doc = g.to_json()
        doc["checks"] = checks.to_json()
        text = _dumps(doc)
    else:
        lines = [f"{a.spec.name}: dual principal graph, {len(g.top)} top, {len(g.bottom)} bottom, "
                 f"{g.n_edges()} edges"]
        for t in g.top:
            nb = ", ".join(b if m == 1 else f"{b} x{m}" for b, m in g.neighbours(t).items())
            lines.append(f"  {t}: {nb}")
        lines.append(checks.text())
        text = "\n".join(lines) + "\n"
    return text, code


def cmd_verify(cfg: RunConfig) -> tuple[str, int]:
    if cfg.spec and cfg.spec not in BUILTIN:
        return _verify_path(cfg)
    names = None if (cfg.all or not cfg.spec) else [cfg.spec]
    data = acceptance.file_checks(names)
    broken = {c.name.split(".")[0] for c in data.failures()}
    healthy = [n for n in (names or BUILTIN) if n not in broken]
    res = acceptance.run_suite(healthy) if healthy else acceptance.SuiteResult()
    ok = data.ok and res.ok
    if cfg.format == "json":
        doc = res.to_json()
        doc["data"] = data.to_json()
        doc["ok"] = ok
        return _dumps(doc), EXIT_OK if ok else EXIT_FAIL
    lines = [f"data: {'PASS' if data.ok else 'FAIL'}  ({data_dir()})"]
    lines += ["    " + c.line() for c in data.failures()]
    lines += res.lines()
    lines.append(f"verify: {'PASS' if ok else 'FAIL'}")
    return "\n".join(lines) + "\n", EXIT_OK if ok else EXIT_FAIL


def _verify_path(cfg: RunConfig) -> tuple[str, int]:
    """Invariant checks for a user-supplied descriptor (no reference values exist for it)."""
    a = analyze(cfg.spec, cfg.mode, cfg.index_rtol)
    rep = Report(f"verify {cfg.spec}")
    rep.extend(a.checks)
    if a.system.certificate is not None:
        rep.extend(a.system.certificate, "certificate.")
    if a.graph is not None:
        rep.extend(check_balance(a.graph), "graph.")
    code = EXIT_OK if rep.ok else EXIT_FAIL
    if cfg.format == "json":
        return _dumps({"schema": "v1", "ok": rep.ok, "report": rep.to_json()}), code
    return rep.text() + "\n", code


COMMANDS = {"examples": cmd_examples, "analyze": cmd_analyze, "graph": cmd_graph, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sector-doubler",
                                 description="Quantum double sector systems of alpha-induced systems.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("spec", nargs="?", help="built-in inclusion name or path to a descriptor")
    ap.add_argument("--mode", default="chiral", choices=["chiral", "full"])
    ap.add_argument("--format", choices=["json", "text", "dot"])
    ap.add_argument("--golden", help="golden graph file (graph command)")
    ap.add_argument("--output", help="write to this file instead of stdout")
    ap.add_argument("--all", action="store_true", help="verify every bundled inclusion")
    ap.add_argument("--index-rtol", type=float, default=INDEX_RTOL,
                    help=f"relative tolerance of the global index certificate (default {INDEX_RTOL})")
    return ap


def _module_message(exc: Exception) -> str:
    for cls, mod in _MODULE_OF.items():
        if isinstance(exc, cls):
            return f"{mod}: {exc}"
    return str(exc)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.command, args.spec, args.mode, args.format, args.output, args.golden,
                        args.all, args.index_rtol)
        with np.errstate(all="ignore"):
            text, code = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        sys.stderr.write(f"sector-doubler: error: {exc}\n")
        return EXIT_USAGE
    except tuple(_MODULE_OF) as exc:
        sys.stderr.write(f"sector-doubler: error: {_module_message(exc)}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"sector-doubler: error: {exc}\n")
        return EXIT_USAGE
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
