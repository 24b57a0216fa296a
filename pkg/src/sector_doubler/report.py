"""Small pass/fail report objects shared by the verification routines."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""
    witness: Any = None

    def line(self) -> str:
        mark = "PASS" if self.ok else "FAIL"
        tail = f" -- {self.detail}" if self.detail else ""
        return f"[{mark}] {self.name}{tail}"


@dataclass
class Report:
    title: str
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = "", witness: Any = None) -> Check:
        check = Check(name, bool(ok), detail, witness)
        self.checks.append(check)
        return check

    def extend(self, other: "Report", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.ok, c.detail, c.witness))

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def text(self) -> str:
        head = f"{self.title}: {'ok' if self.ok else 'FAILED'}"
        return "\n".join([head] + ["  " + c.line() for c in self.checks])

    def to_json(self) -> dict:
        return {
            "title": self.title,
            "ok": self.ok,
            "checks": [
                {"name": c.name, "ok": c.ok, "detail": c.detail,
                 "witness": _plain(c.witness)}
                for c in self.checks
            ],
        }


def _plain(obj):
    if obj is None or isinstance(obj, (str, int, float, bool)):
        return obj
    if isinstance(obj, (list, tuple)):
        return [_plain(o) for o in obj]
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    try:
        return obj.item()
    except AttributeError:
        return str(obj)
