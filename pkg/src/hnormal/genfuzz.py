"""Random H-unitary generators, canonical-family samplers and the round-trip oracle."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import BadRange, OracleFailure, SingularH
from .families import (
    COMPLEX_SLOTS,
    SLOTS,
    SQRT3,
    UNIT_SLOTS,
    FamilyTag,
    InvariantRecord,
    constraint_violations,
    param_distance,
    record,
    template,
)
from .matcore import IndefinitePair, as_matrix, conjugate_pair

HALF_PI = math.pi / 2
PI = math.pi

# Sampling boxes. Strict inequalities keep a margin of at least 0.05 so that
# tolerance snapping can never move a sample across a family boundary.
_BASE = {
    "lambda1": (-1.0, 1.0),
    "lambda2": (-1.0, 1.0),
    "x": (-1.0, 1.0),
    "z": (0.0, 2 * PI),
    "z1": (0.0, 2 * PI),
    "z2": (0.0, 2 * PI),
    "r": (-2.0, 2.0),
    "r1": (-2.0, 2.0),
    "r2": (-2.0, 2.0),
    "r3": (-2.0, 2.0),
}

_FAMILY_RANGES: dict[FamilyTag, dict[str, tuple[float, float]]] = {
    FamilyTag.D1_IND_N5_B: {"z": (0.05, PI - 0.05)},
    FamilyTag.D1_DEC_N4_B: {"r": (0.05, 2.0)},
    FamilyTag.D1_DEC_N4_C: {"r": (0.05, 2.0)},
    FamilyTag.D1_DEC_N5: {"r1": (0.05, 2.0)},
    FamilyTag.D1_DEC_N6_A: {"r2": (0.05, 2.0)},
    FamilyTag.D1_DEC_N6_B: {"z": (0.05, PI - 0.05), "r2": (0.05, 2.0)},
    FamilyTag.D2_N4_A: {"z": (0.0, PI - 0.05), "r": (SQRT3 + 0.05, 4.0)},
    FamilyTag.D2_N5_B: {"r": (0.05, 2.0)},
    FamilyTag.D2_N6: {"z": (-PI + 0.05, PI - 0.05), "r2": (0.05, 2.0)},
    FamilyTag.D2_N7: {"alpha": (0.05, HALF_PI - 0.05), "beta": (0.05, HALF_PI - 0.05)},
    FamilyTag.D2_N8: {"alpha": (0.05, HALF_PI - 0.1), "beta": (0.05, 1.0), "gamma": (1.05, HALF_PI - 0.05)},
    FamilyTag.RANK1_N3_A: {"z": (0.05, PI - 0.05)},
    FamilyTag.RANK1_N4: {"alpha": (0.05, HALF_PI - 0.05)},
}

# Interior arguments a unit slot must keep away from (redrawn when closer than 0.05).
_EXCLUDED_ARGS = {FamilyTag.D1_IND_N5_B: {"z": HALF_PI}}

MIN_EIG_GAP = 0.2


def default_ranges(family: FamilyTag) -> dict[str, tuple[float, float]]:
    family = FamilyTag(family)
    out = {s: _BASE[s] for s in ("lambda1",) + SLOTS[family] if s in _BASE}
    out.update(_FAMILY_RANGES.get(family, {}))
    return out


@dataclass(frozen=True)
class SampleSpec:
    """What to sample: a family, a seed and optional per-slot intervals.

    Unit-modulus slots take an interval of arguments; complex slots use the same
    interval for real and imaginary parts.
    """

    family: FamilyTag
    seed: int = 0
    param_ranges: dict = field(default_factory=dict)


def random_h_unitary(H, seed: int, magnitude: float = 0.5) -> np.ndarray:
    """``exp(K)`` for a random H-skew-adjoint ``K`` (``K^[*] = -K``) of size ``magnitude``."""
    H = as_matrix(H)
    n = H.shape[0]
    if magnitude < 0:
        raise ValueError("magnitude must be nonnegative")
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    S = (A - A.conj().T) / 2
    try:
        K = np.linalg.solve(H, S)
    except np.linalg.LinAlgError as exc:
        raise SingularH("H is singular") from exc
    return sla.expm(magnitude * K)


def _draw(rng, slot, lo, hi):
    u = rng.uniform(lo, hi) if hi > lo else lo
    if slot in UNIT_SLOTS:
        return cmath.exp(1j * u)
    if slot in COMPLEX_SLOTS:
        v = rng.uniform(lo, hi) if hi > lo else lo
        return complex(u, v)
    return u


def sample_canonical(spec: SampleSpec) -> tuple[IndefinitePair, InvariantRecord]:
    """Instantiate the family template at parameters drawn from ``spec``."""
    fam = FamilyTag(spec.family)
    ranges = default_ranges(fam)
    for k, v in spec.param_ranges.items():
        if k not in ("lambda1",) + SLOTS[fam]:
            raise BadRange(f"{fam} has no slot {k!r}")
        ranges[k] = tuple(v)
    for k, (lo, hi) in ranges.items():
        if not lo <= hi:
            raise BadRange(f"empty interval for {k}: [{lo}, {hi}]")
    rng = np.random.default_rng(spec.seed)
    vals = {k: _draw(rng, k, *ranges[k]) for k in ("lambda1",) + SLOTS[fam]}
    for k, bad_arg in _EXCLUDED_ARGS.get(fam, {}).items():
        for _ in range(1000):
            if abs(cmath.phase(vals[k]) - bad_arg) >= 0.05:
                break
            vals[k] = _draw(rng, k, *ranges[k])
        else:
            raise BadRange(f"cannot keep {k} away from argument {bad_arg:.6g} inside the given box")
    if fam in (FamilyTag.TWO_EIG, FamilyTag.RANK1_TWO_EIG):
        for _ in range(1000):
            if abs(vals["lambda1"] - vals["lambda2"]) >= MIN_EIG_GAP:
                break
            vals["lambda2"] = _draw(rng, "lambda2", *ranges["lambda2"])
        else:
            raise BadRange("cannot separate the two eigenvalues inside the given box")
        d = vals["lambda1"] - vals["lambda2"]
        need = fam is FamilyTag.RANK1_TWO_EIG or abs(vals["x"]) > 0
        if need and not (d.imag > 0 or (d.imag == 0 and d.real > 0)):
            vals["lambda1"], vals["lambda2"] = vals["lambda2"], vals["lambda1"]
    if fam is FamilyTag.D2_N7:
        if abs(vals["beta"] - HALF_PI) < 1e-12:
            vals["z1"] = 1.0
        if abs(vals["alpha"] - HALF_PI) < 1e-12:
            vals["z2"] = 1.0
    if fam is FamilyTag.D2_N8:
        if abs(vals["gamma"] - HALF_PI) < 1e-12:
            vals["z1"] = 1.0
        if abs(vals["alpha"]) < 1e-12:
            vals["z2"] = 1.0
    rec = record(**vals)
    bad = constraint_violations(fam, rec, tol=1e-12)
    if bad:
        raise BadRange(f"{fam}: sampled parameters violate {bad}")
    N, H = template(fam, rec)
    return IndefinitePair(N, H), rec


@dataclass
class OracleReport:
    family: FamilyTag
    seed: int
    runs: int
    failures: list = field(default_factory=list)
    max_param_deviation: float = 0.0
    max_residual: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures


def roundtrip_oracle(spec: SampleSpec, n_conjugations: int = 10, magnitude: float = 0.5,
                     param_tol: float = 1e-6, residual_tol: float = 1e-8,
                     raise_on_failure: bool = True) -> OracleReport:
    """Classify random H-unitary conjugates of a sample; everything must come back."""
    from .classify import classify_pair  # local: classify imports this module's siblings

    fam = FamilyTag(spec.family)
    pair, rec = sample_canonical(spec)
    report = OracleReport(fam, spec.seed, n_conjugations)
    for k in range(n_conjugations):
        useed = spec.seed * 1_000_003 + k + 1
        U = random_h_unitary(pair.H, useed, magnitude)
        conj = conjugate_pair(pair, U)
        try:
            res = classify_pair(conj)
        except Exception as exc:  # noqa: BLE001 - every failure is recorded
            report.failures.append((useed, f"{type(exc).__name__}: {exc}"))
            continue
        if len(res) != 1:
            report.failures.append((useed, f"split into {len(res)} blocks"))
            continue
        form, cert = res[0]
        dev = param_distance(form.params, rec)
        resid = max(cert.residual_similarity, cert.residual_congruence)
        report.max_param_deviation = max(report.max_param_deviation, dev)
        report.max_residual = max(report.max_residual, resid)
        if form.family is not fam:
            report.failures.append((useed, f"family {form.family}"))
        elif dev > param_tol:
            report.failures.append((useed, f"parameter deviation {dev:.3g}"))
        elif resid > residual_tol:
            report.failures.append((useed, f"certificate residual {resid:.3g}"))
    if report.failures and raise_on_failure:
        useed, why = report.failures[0]
        raise OracleFailure(f"{fam} seed {spec.seed}: {why}", family=str(fam), seed=spec.seed,
                            conjugation_seed=useed, deviation=report.max_param_deviation)
    return report
