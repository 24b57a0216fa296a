"""Monodromy matrix, modular S/T and degeneracy tests for braided fusion rings."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import numpy as np

from .fusion_core import FusionRing, build_ring, global_index
from .report import Report

ID_TOL = 1e-9
UNITARY_TOL = 1e-8
DEG_TOL = 1e-6


class ModularDataError(ValueError):
    pass


def conformal_weights(algebra: str, level: int) -> list[Fraction]:
    """Affine conformal weights h, in the canonical label order, as exact rationals."""
    ring = build_ring(algebra, level)
    k = level
    if algebra == "su2":
        return [Fraction(j * (j + 2), 4 * (k + 2)) for (j,) in (l.weight for l in ring.labels)]
    if algebra == "su3":
        out = []
        for lab in ring.labels:
            p, q = lab.weight
            a, b = p - q, q
            out.append(Fraction(a * a + a * b + b * b + 3 * a + 3 * b, 3 * (k + 3)))
        return out
    raise ModularDataError(f"no conformal weights for algebra {algebra!r}")


def conformal_phases(algebra: str, level: int) -> np.ndarray:
    """Statistics phases exp(2 pi i h) for the level-k WZW primaries."""
    h = conformal_weights(algebra, level)
    # reduce mod 1 exactly before going to floating point
    frac = np.array([float(x - (x.numerator // x.denominator)) for x in h])
    return np.exp(2j * np.pi * frac)


@dataclass(frozen=True, eq=False)
class ModularData:
    ring: FusionRing
    omega: np.ndarray
    Y: np.ndarray
    z: complex
    c: float
    S: np.ndarray
    T: np.ndarray

    def to_json(self) -> dict:
        def cplx(m):
            m = np.asarray(m)
            return np.stack([m.real, m.imag], axis=-1).tolist()

        return {
            "schema": "v1",
            "algebra": self.ring.algebra,
            "level": self.ring.level,
            "labels": [l.name for l in self.ring.labels],
            "omega": cplx(self.omega),
            "z": [self.z.real, self.z.imag],
            "c": self.c,
            "Y": cplx(self.Y),
            "S": cplx(self.S),
            "T": cplx(self.T),
        }


def monodromy_matrix(ring: FusionRing, omega: np.ndarray) -> np.ndarray:
    omega = np.asarray(omega, dtype=complex)
    weights = ring.fusion * (ring.dims / omega)[None, None, :]
    return np.outer(omega, omega) * weights.sum(axis=2)


def build_modular(ring: FusionRing, omega) -> ModularData:
    omega = np.asarray(omega, dtype=complex)
    if omega.shape != (ring.rank,):
        raise ModularDataError(f"phase vector has shape {omega.shape}, ring rank {ring.rank}")
    if np.abs(np.abs(omega) - 1).max() > ID_TOL:
        raise ModularDataError("statistics phases must have unit modulus")
    Y = monodromy_matrix(ring, omega)
    d = ring.dims
    z = complex(np.sum(d ** 2 * omega))
    if abs(z) < 1e-9:
        raise ModularDataError("central charge undefined: z vanishes")
    c = float((4 * np.angle(z) / np.pi) % 8)
    if c > 8 - 1e-9:
        c = 0.0
    S = Y / abs(z)
    T = np.exp(-1j * np.pi * c / 12) * np.diag(omega)
    md = ModularData(ring, omega, Y, z, c, S, T)
    rep = check_modular(md)
    if not rep.ok:
        raise ModularDataError("modular data invariants violated:\n" + rep.text())
    return md


def check_modular(md: ModularData, tol: float = ID_TOL, full: bool = False) -> Report:
    """Invariants that hold for any braided system; ``full`` adds the non-degenerate ones."""
    ring, Y, S, T = md.ring, md.Y, md.S, md.T
    scale = max(1.0, float(np.abs(Y).max()))
    conj = list(ring.conj)
    rep = Report(f"modular data {ring.title}")
    rep.add("Y_symmetric", np.abs(Y - Y.T).max() < tol * scale)
    rep.add("Y_conj", np.abs(Y[conj] - Y.conj()).max() < tol * scale)
    rep.add("Y_col0_dims", np.abs(Y[:, ring.identity] - ring.dims).max() < tol * scale)
    Om = np.diag(md.omega)
    err = np.abs(Om @ Y @ Om @ Y @ Om - md.z * Y).max()
    rep.add("OYOYO_zY", err < tol * scale * scale * max(1.0, abs(md.z)), f"residual {err:.2e}")
    if full:
        err = np.abs(T @ S @ T @ S @ T - S).max()
        rep.add("TSTST_S", err < tol, f"residual {err:.2e}")
        err = np.abs(S @ S.conj().T - np.eye(ring.rank)).max()
        rep.add("S_unitary", err < tol, f"residual {err:.2e}")
        gi = global_index(ring)
        rep.add("z_global_index", abs(abs(md.z) ** 2 - gi) < tol * gi,
                f"|z|^2={abs(md.z) ** 2:.10g} index={gi:.10g}")
        rep.add("verlinde", *verlinde_roundtrip(md))
    return rep


def verlinde_roundtrip(md: ModularData, tol: float = 1e-6):
    S = md.S
    s0 = S[md.ring.identity]
    N = np.einsum("ls,ms,ns,s->lmn", S, S, S.conj(), 1.0 / s0, optimize=True)
    err = np.abs(N - md.ring.fusion).max()
    ok = bool(err < tol)
    wit = None
    if not ok:
        wit = tuple(int(i) for i in np.unravel_index(np.argmax(np.abs(N - md.ring.fusion)), N.shape))
    return ok, f"max deviation {err:.2e}", wit


@lru_cache(maxsize=None)
def standard_modular(algebra: str, level: int) -> ModularData:
    ring = build_ring(algebra, level)
    return build_modular(ring, conformal_phases(algebra, level))


def is_nondegenerate(md: ModularData, tol: float = UNITARY_TOL) -> bool:
    S = md.S
    return bool(np.abs(S @ S.conj().T - np.eye(S.shape[0])).max() < tol)


def restrict(md: ModularData, members: Iterable[int]) -> ModularData:
    """Modular data of a fusion-closed subsystem (used to test degeneracy of the restriction)."""
    idx = sorted(int(i) for i in members)
    ring = md.ring
    from .fusion_core import make_ring

    sub_fusion = ring.fusion[np.ix_(idx, idx, idx)]
    sub = make_ring(f"{ring.algebra}-sub", [ring.labels[i].name for i in idx], sub_fusion,
                    colors=[ring.labels[i].color for i in idx], n_colors=ring.n_colors,
                    level=ring.level, weights=[ring.labels[i].weight for i in idx])
    om = md.omega[idx]
    Y = monodromy_matrix(sub, om)
    z = complex(np.sum(sub.dims ** 2 * om))
    # |z| can vanish on a degenerate restriction; the square root of the global
    # index coincides with |z| whenever the restriction is non-degenerate.
    norm = np.sqrt(global_index(sub))
    c = float((4 * np.angle(z) / np.pi) % 8) if abs(z) > 1e-9 else float("nan")
    T = np.exp(-1j * np.pi * c / 12) * np.diag(om) if abs(z) > 1e-9 else np.diag(om)
    return ModularData(sub, om, Y, z, c, Y / norm, T)


@dataclass(frozen=True, eq=False)
class Subsystem:
    ring: FusionRing
    members: tuple[int, ...]
    deg: tuple[int, ...] | None = None
    per: tuple[int, ...] | None = None

    def names(self, which: str = "members") -> list[str]:
        return self.ring.names(getattr(self, which))

    def with_sets(self, md: ModularData) -> "Subsystem":
        return Subsystem(self.ring, self.members, tuple(degenerate_set(md, self)),
                         tuple(relative_permutant(md, self)))

    def to_json(self) -> dict:
        out = {"members": self.names()}
        if self.deg is not None:
            out["deg"] = self.names("deg")
        if self.per is not None:
            out["per"] = self.names("per")
        return out


def subsystem(ring: FusionRing, members: Iterable) -> Subsystem:
    idx = tuple(sorted({ring.index(m) for m in members}))
    check = closure_report(ring, idx)
    if not check.ok:
        raise ModularDataError("not a subsystem:\n" + check.text())
    return Subsystem(ring, idx)


def closure_report(ring: FusionRing, members: Iterable[int]) -> Report:
    m = sorted(set(members))
    rep = Report("subsystem closure")
    rep.add("contains_id", ring.identity in m)
    mset = set(m)
    rep.add("conj_closed", all(ring.conj[i] in mset for i in m))
    outside = [i for i in range(ring.rank) if i not in mset]
    leak = ring.fusion[np.ix_(m, m, outside)] if outside else np.zeros((0,))
    bad = np.argwhere(leak > 0) if outside else []
    wit = None
    if len(bad):
        a, b, c = bad[0]
        wit = (m[a], m[b], outside[c])
    rep.add("fusion_closed", wit is None, "" if wit is None else f"N{wit} > 0 leaves the set", wit)
    return rep


def color_zero_subsystem(ring: FusionRing) -> Subsystem:
    return subsystem(ring, [l.index for l in ring.labels if l.color == 0])


def full_subsystem(ring: FusionRing) -> Subsystem:
    return Subsystem(ring, tuple(range(ring.rank)))


def _trivial_monodromy(md: ModularData, rows: Iterable[int], cols: Iterable[int]) -> np.ndarray:
    rows, cols = list(rows), list(cols)
    d = md.ring.dims
    diff = np.abs(md.Y[np.ix_(rows, cols)] - np.outer(d[rows], d[cols]))
    return (diff < DEG_TOL).all(axis=1)


def degenerate_set(md: ModularData, sub: Subsystem) -> list[int]:
    mem = list(sub.members)
    ok = _trivial_monodromy(md, mem, mem)
    return sorted({m for m, flag in zip(mem, ok) if flag} | {md.ring.identity})


def relative_permutant(md: ModularData, sub: Subsystem) -> list[int]:
    ok = _trivial_monodromy(md, range(md.ring.rank), sub.members)
    return [i for i in range(md.ring.rank) if ok[i]]
