"""Catalog of canonical pairs: tags, parameter records, templates, constraints."""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, fields, replace
from typing import Optional

import numpy as np

from .errors import BadRange
from .matcore import frame_h, sec_diag

SQRT3 = math.sqrt(3.0)
W60 = cmath.exp(1j * math.pi / 3)  # e^{i pi/3}
SNAP = 1e-9


class FamilyTag(str, enum.Enum):
    TWO_EIG = "TWO_EIG"
    D1_IND_N4 = "D1_IND_N4"
    D1_IND_N5_A = "D1_IND_N5_A"
    D1_IND_N5_B = "D1_IND_N5_B"
    D1_IND_N5_C = "D1_IND_N5_C"
    D1_DEC_N4_A = "D1_DEC_N4_A"
    D1_DEC_N4_B = "D1_DEC_N4_B"
    D1_DEC_N4_C = "D1_DEC_N4_C"
    D1_DEC_N5 = "D1_DEC_N5"
    D1_DEC_N6_A = "D1_DEC_N6_A"
    D1_DEC_N6_B = "D1_DEC_N6_B"
    D2_N4_A = "D2_N4_A"
    D2_N4_B = "D2_N4_B"
    D2_N5_A = "D2_N5_A"
    D2_N5_B = "D2_N5_B"
    D2_N6 = "D2_N6"
    D2_N7 = "D2_N7"
    D2_N8 = "D2_N8"
    RANK0 = "RANK0"
    RANK1_J2 = "RANK1_J2"
    RANK1_N3_A = "RANK1_N3_A"
    RANK1_N3_B = "RANK1_N3_B"
    RANK1_N4 = "RANK1_N4"
    RANK1_TWO_EIG = "RANK1_TWO_EIG"

    def __str__(self):
        return self.value


RANK2_FAMILIES = tuple(t for t in FamilyTag if not t.value.startswith("RANK"))
LOW_RANK_FAMILIES = tuple(t for t in FamilyTag if t.value.startswith("RANK"))

# parameter slots (besides lambda1, which every family carries)
SLOTS: dict[FamilyTag, tuple[str, ...]] = {
    FamilyTag.TWO_EIG: ("lambda2", "x"),
    FamilyTag.D1_IND_N4: ("z", "r1", "r2"),
    FamilyTag.D1_IND_N5_A: ("r1", "r2", "r3"),
    FamilyTag.D1_IND_N5_B: ("z", "r1", "r2", "r3"),
    FamilyTag.D1_IND_N5_C: ("r1", "r2", "r3"),
    FamilyTag.D1_DEC_N4_A: ("z",),
    FamilyTag.D1_DEC_N4_B: ("z", "r"),
    FamilyTag.D1_DEC_N4_C: ("z", "r"),
    FamilyTag.D1_DEC_N5: ("z", "r1", "r2"),
    FamilyTag.D1_DEC_N6_A: ("r1", "r2", "r3"),
    FamilyTag.D1_DEC_N6_B: ("z", "r1", "r2", "r3"),
    FamilyTag.D2_N4_A: ("z", "r"),
    FamilyTag.D2_N4_B: (),
    FamilyTag.D2_N5_A: ("z",),
    FamilyTag.D2_N5_B: ("z", "r"),
    FamilyTag.D2_N6: ("z", "r1", "r2"),
    FamilyTag.D2_N7: ("z1", "z2", "alpha", "beta"),
    FamilyTag.D2_N8: ("z1", "z2", "alpha", "beta", "gamma"),
    FamilyTag.RANK0: (),
    FamilyTag.RANK1_J2: ("z",),
    FamilyTag.RANK1_N3_A: ("z", "r"),
    FamilyTag.RANK1_N3_B: ("r",),
    FamilyTag.RANK1_N4: ("alpha",),
    FamilyTag.RANK1_TWO_EIG: ("lambda2",),
}

COMPLEX_SLOTS = {"lambda1", "lambda2", "x"}
UNIT_SLOTS = {"z", "z1", "z2"}
REAL_SLOTS = {"r", "r1", "r2", "r3", "alpha", "beta", "gamma"}

SIZES = {
    FamilyTag.TWO_EIG: 4, FamilyTag.D1_IND_N4: 4,
    FamilyTag.D1_IND_N5_A: 5, FamilyTag.D1_IND_N5_B: 5, FamilyTag.D1_IND_N5_C: 5,
    FamilyTag.D1_DEC_N4_A: 4, FamilyTag.D1_DEC_N4_B: 4, FamilyTag.D1_DEC_N4_C: 4,
    FamilyTag.D1_DEC_N5: 5, FamilyTag.D1_DEC_N6_A: 6, FamilyTag.D1_DEC_N6_B: 6,
    FamilyTag.D2_N4_A: 4, FamilyTag.D2_N4_B: 4, FamilyTag.D2_N5_A: 5, FamilyTag.D2_N5_B: 5,
    FamilyTag.D2_N6: 6, FamilyTag.D2_N7: 7, FamilyTag.D2_N8: 8,
    FamilyTag.RANK0: 1, FamilyTag.RANK1_J2: 2, FamilyTag.RANK1_N3_A: 3,
    FamilyTag.RANK1_N3_B: 3, FamilyTag.RANK1_N4: 4, FamilyTag.RANK1_TWO_EIG: 2,
}


@dataclass(frozen=True)
class InvariantRecord:
    """Parameter values of a canonical pair; unused slots stay ``None``."""

    lambda1: Optional[complex] = None
    lambda2: Optional[complex] = None
    x: Optional[complex] = None
    z: Optional[complex] = None
    z1: Optional[complex] = None
    z2: Optional[complex] = None
    r: Optional[float] = None
    r1: Optional[float] = None
    r2: Optional[float] = None
    r3: Optional[float] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    gamma: Optional[float] = None

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self) if getattr(self, f.name) is not None}

    def replace(self, **kw) -> "InvariantRecord":
        return replace(self, **kw)


def record(**kw) -> InvariantRecord:
    """Build a record, coercing each slot to its numeric kind."""
    out = {}
    for k, v in kw.items():
        if v is None:
            continue
        if k in REAL_SLOTS:
            out[k] = float(np.real(v))
        else:
            out[k] = complex(v)
    return InvariantRecord(**out)


# --- helpers ---------------------------------------------------------------

def arg02pi(z: complex) -> float:
    """Principal argument in ``[0, 2 pi)``."""
    a = cmath.phase(z)
    if a < 0:
        a += 2 * math.pi
    return 0.0 if 2 * math.pi - a < SNAP else a


def unit(z: complex) -> complex:
    return z / abs(z)


def _hh(s: int) -> np.ndarray:
    return frame_h(s)


def _chain_plus_scalar_h() -> np.ndarray:
    H = np.zeros((6, 6), dtype=complex)
    H[0, 5] = H[5, 0] = 1
    H[1, 3] = H[3, 1] = H[2, 2] = 1
    H[4, 4] = 1
    return H


def template_h(tag: FamilyTag) -> np.ndarray:
    n = SIZES[tag]
    if tag in (FamilyTag.TWO_EIG, FamilyTag.D2_N4_A, FamilyTag.D2_N4_B):
        return _hh(2)
    if tag in (FamilyTag.D1_DEC_N6_A, FamilyTag.D1_DEC_N6_B):
        return _chain_plus_scalar_h()
    if tag in (FamilyTag.D2_N5_A, FamilyTag.D2_N5_B):
        return frame_h(2, np.eye(1))
    if tag is FamilyTag.D2_N6:
        return frame_h(2, np.eye(2))
    if tag is FamilyTag.D2_N7:
        return frame_h(2, np.eye(3))
    if tag is FamilyTag.D2_N8:
        return frame_h(2, np.eye(4))
    if tag is FamilyTag.RANK0:
        return np.ones((1, 1), dtype=complex)
    if tag is FamilyTag.RANK1_N4:
        return frame_h(1, np.eye(2))
    return sec_diag(n)


def _set(M, entries):
    for (i, j), v in entries.items():
        M[i, j] = v
    return M


def template_nilpart(tag: FamilyTag, p: InvariantRecord) -> np.ndarray:
    """``N - lambda1 I`` of the template (for TWO_EIG the full ``N - lambda1 I``)."""
    n = SIZES[tag]
    M = np.zeros((n, n), dtype=complex)
    T = FamilyTag
    z = p.z
    if tag is T.TWO_EIG:
        d = p.lambda2 - p.lambda1
        return _set(M, {(0, 1): 1, (2, 2): d, (3, 3): d, (3, 2): p.x})
    if tag is T.D1_IND_N4:
        return _set(M, {(0, 1): 1, (0, 2): 1j * p.r1, (0, 3): 1j * p.r2 * z, (1, 2): z, (2, 3): z * z})
    if tag is T.D1_IND_N5_A:
        r1, r2, r3 = p.r1, p.r2, p.r3
        return _set(M, {(0, 1): 1, (0, 4): 1j * r3, (1, 2): 1, (1, 3): 1j * r1,
                        (1, 4): -2 * r1 ** 2 + 1j * r2, (2, 3): 1, (2, 4): 2j * r1, (3, 4): 1})
    if tag is T.D1_IND_N5_B:
        r1, r2, r3 = p.r1, p.r2, p.r3
        im = z.imag
        return _set(M, {(0, 1): 1, (0, 4): 1j * r3, (1, 2): z, (1, 3): r1,
                        (1, 4): -2 * z * z * r1 ** 2 * im ** 2 + 1j * r2 * z * z,
                        (2, 3): z, (2, 4): -2j * r1 * z * z * im, (3, 4): z * z})
    if tag is T.D1_IND_N5_C:
        r1, r2, r3 = p.r1, p.r2, p.r3
        return _set(M, {(0, 1): 1, (0, 4): r3, (1, 2): 1j, (1, 3): r1,
                        (1, 4): 2 * r1 ** 2 + 1j * r2, (2, 3): 1j, (2, 4): 2j * r1, (3, 4): -1})
    if tag is T.D1_DEC_N4_A:
        return _set(M, {(0, 1): 1, (1, 3): z})
    if tag is T.D1_DEC_N4_B:
        return _set(M, {(0, 1): 1, (0, 2): 1, (1, 3): z, (2, 3): (1 + 1j * p.r) * z})
    if tag is T.D1_DEC_N4_C:
        return _set(M, {(0, 1): 1, (0, 2): -1, (1, 3): z, (2, 3): -(1 + 1j * p.r) * z})
    if tag is T.D1_DEC_N5:
        return _set(M, {(0, 1): 1, (0, 3): 0.5 * p.r1 ** 2 + 1j * p.r2, (1, 3): z,
                        (2, 4): p.r1, (3, 4): z * z})
    if tag is T.D1_DEC_N6_A:
        r1, r2, r3 = p.r1, p.r2, p.r3
        return _set(M, {(0, 1): 1, (0, 2): 2j * r1, (1, 2): 1, (1, 3): 1j * r1,
                        (1, 5): 2 * r1 ** 2 - r2 ** 2 / 2 + 1j * r3, (2, 3): 1, (3, 5): 1, (4, 5): r2})
    if tag is T.D1_DEC_N6_B:
        r1, r2, r3 = p.r1, p.r2, p.r3
        im = z.imag
        return _set(M, {(0, 1): 1, (0, 2): -2j * r1 * im, (1, 2): z, (1, 3): r1,
                        (1, 5): (2 * r1 ** 2 * im ** 2 - r2 ** 2 / 2 + 1j * r3) * z * z,
                        (2, 3): z, (3, 5): z * z, (4, 5): r2})
    if tag is T.D2_N4_A:
        return _set(M, {(0, 2): z, (0, 3): p.r * z / W60, (1, 3): W60 * z})
    if tag is T.D2_N4_B:
        return _set(M, {(1, 2): 1})
    if tag is T.D2_N5_A:
        return _set(M, {(0, 2): 1, (1, 3): 1, (2, 3): z})
    if tag is T.D2_N5_B:
        return _set(M, {(0, 2): 1, (1, 3): p.r, (1, 4): z, (2, 3): z * z})
    if tag is T.D2_N6:
        return _set(M, {(0, 2): 1, (0, 4): 1j * p.r1, (1, 3): 1, (1, 4): p.r2,
                        (1, 5): 1j * p.r1, (2, 4): z, (3, 5): z})
    if tag is T.D2_N7:
        z1, z2, a, b = p.z1, p.z2, p.alpha, p.beta
        ca, sa, cb, sb = math.cos(a), math.sin(a), math.cos(b), math.sin(b)
        return _set(M, {(0, 2): 1, (1, 3): 1,
                        (2, 5): -z1 * z2.conjugate() * ca, (2, 6): sa * cb,
                        (3, 5): z1 * sa, (3, 6): z2 * ca * cb, (4, 6): sb})
    if tag is T.D2_N8:
        z1, z2, a, b, g = p.z1, p.z2, p.alpha, p.beta, p.gamma
        ca, sa = math.cos(a), math.sin(a)
        cb, sb, cg, sg = math.cos(b), math.sin(b), math.cos(g), math.sin(g)
        return _set(M, {(0, 2): 1, (1, 3): 1,
                        (2, 6): -z1 * z2.conjugate() * sa * cb, (2, 7): ca * cg,
                        (3, 6): z1 * ca * cb, (3, 7): z2 * sa * cg,
                        (4, 6): sb, (5, 7): sg})
    if tag is T.RANK0:
        return M
    if tag is T.RANK1_J2:
        return _set(M, {(0, 1): z})
    if tag is T.RANK1_N3_A:
        return _set(M, {(0, 1): z, (0, 2): p.r, (1, 2): z})
    if tag is T.RANK1_N3_B:
        return _set(M, {(0, 1): 1, (0, 2): 1j * p.r, (1, 2): 1})
    if tag is T.RANK1_N4:
        return _set(M, {(0, 1): math.cos(p.alpha), (0, 2): math.sin(p.alpha), (1, 3): 1})
    if tag is T.RANK1_TWO_EIG:
        return _set(M, {(1, 1): p.lambda2 - p.lambda1})
    raise ValueError(f"unknown family {tag}")


def template(tag: FamilyTag, p: InvariantRecord, h_sign: int = 1):
    """Canonical ``(N, H)`` for a family and parameter record."""
    tag = FamilyTag(tag)
    missing = [s for s in ("lambda1",) + SLOTS[tag] if getattr(p, s) is None]
    if missing:
        raise BadRange(f"{tag}: missing parameters {missing}")
    n = SIZES[tag]
    N = template_nilpart(tag, p) + p.lambda1 * np.eye(n)
    return N, h_sign * template_h(tag)


# --- constraints -------------------------------------------------------------

def _order_ok(l1: complex, l2: complex, tol: float) -> bool:
    d = l1 - l2
    if abs(d.imag) > tol:
        return d.imag > 0
    return d.real > tol


def constraint_violations(tag: FamilyTag, p: InvariantRecord, tol: float = SNAP) -> list[str]:
    """Human-readable list of violated domain constraints (empty when valid)."""
    tag = FamilyTag(tag)
    bad: list[str] = []
    for s in ("lambda1",) + SLOTS[tag]:
        v = getattr(p, s)
        if v is None:
            bad.append(f"{s} missing")
        elif s in UNIT_SLOTS and abs(abs(v) - 1) > tol:
            bad.append(f"|{s}| != 1")
        elif not np.isfinite(v):
            bad.append(f"{s} not finite")
    if bad:
        return bad
    T = FamilyTag
    z = p.z
    if tag is T.TWO_EIG:
        if abs(p.lambda1 - p.lambda2) <= tol:
            bad.append("lambda1 == lambda2")
        elif abs(p.x) > tol and not _order_ok(p.lambda1, p.lambda2, tol):
            bad.append("eigenvalue order violated for x != 0")
    elif tag is T.RANK1_TWO_EIG:
        if abs(p.lambda1 - p.lambda2) <= tol:
            bad.append("lambda1 == lambda2")
        elif not _order_ok(p.lambda1, p.lambda2, tol):
            bad.append("eigenvalue order violated")
    elif tag in (T.D1_IND_N5_B, T.D1_DEC_N6_B, T.RANK1_N3_A):
        a = cmath.phase(z)
        if not (tol < a < math.pi - tol):
            bad.append("need 0 < arg z < pi")
        if tag is T.D1_IND_N5_B and abs(z - 1j) <= tol:
            bad.append("z == i")
    if tag in (T.D1_DEC_N4_B, T.D1_DEC_N4_C, T.D2_N5_B) and not p.r > tol:
        bad.append("need r > 0")
    if tag is T.D1_DEC_N5 and not p.r1 > tol:
        bad.append("need r1 > 0")
    if tag in (T.D1_DEC_N6_A, T.D1_DEC_N6_B, T.D2_N6) and not p.r2 > tol:
        bad.append("need r2 > 0")
    if tag is T.D2_N6 and abs(z + 1) <= tol:
        bad.append("z == -1")
    if tag is T.D2_N4_A:
        if p.r < SQRT3 - tol:
            bad.append("need r >= sqrt(3)")
        elif p.r > SQRT3 + tol and not (-tol <= cmath.phase(z) < math.pi - tol):
            bad.append("need 0 <= arg z < pi when r > sqrt(3)")
    if tag is T.D2_N7:
        a, b = p.alpha, p.beta
        h = math.pi / 2
        if not (tol < a <= h + tol) or not (tol < b <= h + tol):
            bad.append("need 0 < alpha, beta <= pi/2")
        if abs(b - h) <= tol and abs(p.z1 - 1) > tol:
            bad.append("z1 must be 1 when beta = pi/2")
        if abs(a - h) <= tol and abs(p.z2 - 1) > tol:
            bad.append("z2 must be 1 when alpha = pi/2")
    if tag is T.D2_N8:
        a, b, g = p.alpha, p.beta, p.gamma
        h = math.pi / 2
        if not (-tol <= a < h - tol):
            bad.append("need 0 <= alpha < pi/2")
        if not (tol < b < g - tol and g <= h + tol):
            bad.append("need 0 < beta < gamma <= pi/2")
        if abs(g - h) <= tol and abs(p.z1 - 1) > tol:
            bad.append("z1 must be 1 when gamma = pi/2")
        if abs(a) <= tol and abs(p.z2 - 1) > tol:
            bad.append("z2 must be 1 when alpha = 0")
    if tag is T.RANK1_N4 and not (tol < p.alpha <= math.pi / 2 + tol):
        bad.append("need 0 < alpha <= pi/2")
    return bad


def satisfies_constraints(tag, p, tol: float = SNAP) -> bool:
    return not constraint_violations(tag, p, tol)


def param_distance(p: InvariantRecord, q: InvariantRecord) -> float:
    """Max slotwise deviation; ``inf`` if the populated slots differ."""
    a, b = p.as_dict(), q.as_dict()
    if a.keys() != b.keys():
        return math.inf
    return max((abs(a[k] - b[k]) for k in a), default=0.0)
