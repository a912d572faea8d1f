"""Classification results and the certificate builder."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from ..errors import InternalFormMismatch
from ..families import (
    COMPLEX_SLOTS,
    SQRT3,
    UNIT_SLOTS,
    FamilyTag,
    InvariantRecord,
    constraint_violations,
    record,
    template,
)
from ..matcore import IndefinitePair, h_adjoint, max_abs

CERT_DRAWS = 6
# Singular values of the intertwining system below this (relative) count as zero.
INTERTWINE_RTOL = 1e-7


@dataclass(frozen=True)
class CanonicalForm:
    family: FamilyTag
    params: InvariantRecord
    n_tilde: np.ndarray = field(repr=False)
    h_tilde: np.ndarray = field(repr=False)
    h_sign: int = 1

    @property
    def n(self) -> int:
        return self.n_tilde.shape[0]


@dataclass(frozen=True)
class Certificate:
    """``T`` with ``N T = T N~`` and ``T* H T = H~``; residuals in the max-entry norm."""

    T: np.ndarray = field(repr=False)
    residual_similarity: float
    residual_congruence: float

    @property
    def residual(self) -> float:
        return max(self.residual_similarity, self.residual_congruence)


def residuals(N, H, T, Nt, Ht) -> tuple[float, float]:
    return max_abs(N @ T - T @ Nt), max_abs(T.conj().T @ H @ T - Ht)


def intertwiners(N, H, Nt, Ht, rtol: float = INTERTWINE_RTOL) -> list[np.ndarray]:
    """Basis of ``{X : N X = X Nt, N^[*] X = X Nt^[*]}``."""
    n = N.shape[0]
    I = np.eye(n)
    Na, Nta = h_adjoint(N, H), h_adjoint(Nt, Ht)
    K = np.vstack([np.kron(I, N) - np.kron(Nt.T, I), np.kron(I, Na) - np.kron(Nta.T, I)])
    _, s, Vh = np.linalg.svd(K)
    scale = max(1.0, s[0])
    k = int(np.sum(s > rtol * scale))
    return [Vh[j].conj().reshape(n, n, order="F") for j in range(k, n * n)]


def _stacked_residual(N, H, T, Nt, Ht) -> np.ndarray:
    F = np.concatenate([(N @ T - T @ Nt).ravel(), (T.conj().T @ H @ T - Ht).ravel()])
    return np.concatenate([F.real, F.imag])


def polish(N, H, T, Nt, Ht, steps: int = 2) -> np.ndarray:
    """Gauss-Newton steps on both certificate residuals; keeps a step only if it helps."""
    n, m = T.shape
    Im, In = np.eye(m), np.eye(n)
    sim = np.kron(Im, N) - np.kron(Nt.T, In)
    # vec(A^T) = P vec(A) for m x m matrices (column-major vec)
    P = np.eye(m * m)[np.arange(m * m).reshape(m, m).ravel(order="F")]
    best, f0 = T, _stacked_residual(N, H, T, Nt, Ht)
    for _ in range(steps):
        A = np.kron(Im, best.conj().T @ H)
        Jr = np.vstack([sim, A + P @ A.conj()])
        Ji = np.vstack([1j * sim, 1j * (A - P @ A.conj())])
        J = np.hstack([Jr, Ji])
        J = np.vstack([J.real, J.imag])
        x = sla.lstsq(J, -_vec_residual(N, H, best, Nt, Ht), lapack_driver="gelsy")[0]
        cand = best + (x[:n * m] + 1j * x[n * m:]).reshape(n, m, order="F")
        f1 = _stacked_residual(N, H, cand, Nt, Ht)
        if np.max(np.abs(f1)) >= np.max(np.abs(f0)):
            break
        best, f0 = cand, f1
    return best


def _vec_residual(N, H, T, Nt, Ht) -> np.ndarray:
    F = np.concatenate([(N @ T - T @ Nt).ravel(order="F"), (T.conj().T @ H @ T - Ht).ravel(order="F")])
    return np.concatenate([F.real, F.imag])


def _cut_distance(w) -> float:
    """Relative distance of a spectrum from the closed negative half-line."""
    top = max(np.max(np.abs(w)), 1e-300)
    return min(abs(x.imag) if x.real <= 0 else abs(x) for x in w) / top


def certify(N, H, Nt, Ht, seed: int = 0) -> Certificate:
    """H-unitary ``T`` carrying ``(Nt, Ht)`` onto ``(N, H)``.

    A generic intertwiner ``X`` is corrected by ``C^{-1/2}`` where
    ``C = Ht^{-1} X* H X`` commutes with ``Nt`` and ``Nt^[*]`` and is
    ``Ht``-selfadjoint, so ``T = X C^{-1/2}`` still intertwines and satisfies
    ``T* H T = Ht``.
    """
    L = intertwiners(N, H, Nt, Ht)
    if not L:
        raise InternalFormMismatch("no intertwiner between the input and the canonical pair")
    rng = np.random.default_rng(seed)
    found = []
    for _ in range(CERT_DRAWS):
        c = rng.normal(size=len(L)) + 1j * rng.normal(size=len(L))
        X = sum(ci * Li for ci, Li in zip(c, L))
        X = X / np.linalg.norm(X)
        try:
            C = np.linalg.solve(Ht, X.conj().T @ H @ X)
            w = np.linalg.eigvals(C)
            if _cut_distance(w) < 1e-6:
                continue
            T = X @ np.linalg.inv(sla.sqrtm(C))
        except (np.linalg.LinAlgError, ValueError):
            continue
        if np.all(np.isfinite(T)):
            found.append(Certificate(T, *residuals(N, H, T, Nt, Ht)))
    # among draws with a usable residual, the best conditioned keeps later arithmetic exact
    best = None
    if found:
        floor = min(c.residual for c in found)
        ok = [c for c in found if c.residual <= max(1e3 * floor, 1e-10)]
        best = min(ok, key=lambda c: np.linalg.cond(c.T))
    if best is None:
        raise InternalFormMismatch("intertwiners are all singular")
    T = polish(N, H, best.T, Nt, Ht)
    return Certificate(T, *residuals(N, H, T, Nt, Ht))


# Values reached by snapping to a family boundary; refinement leaves them alone.
_PINNED_REAL = (0.0, SQRT3, np.pi / 2)
_PINNED_UNIT = (1.0, 1j)
REFINE_MAX_STEP = 1e-8


def _free_coords(params: InvariantRecord):
    """Real coordinates of the non-pinned slots, and a map back to a record."""
    base = params.as_dict()
    coords = []
    for k, v in base.items():
        if k in COMPLEX_SLOTS:
            coords += [(k, "re"), (k, "im")]
        elif k in UNIT_SLOTS:
            if not any(abs(v - b) == 0 for b in _PINNED_UNIT):
                coords.append((k, "arg"))
        elif not any(v == b for b in _PINNED_REAL):
            coords.append((k, "val"))

    def rebuild(dx):
        out = dict(base)
        for (k, how), d in zip(coords, dx):
            if how == "re":
                out[k] = out[k] + d
            elif how == "im":
                out[k] = out[k] + 1j * d
            elif how == "arg":
                out[k] = out[k] * np.exp(1j * d)
            else:
                out[k] = out[k] + d
        return record(**out)

    return coords, rebuild


def refine_params(N, H, T, family: FamilyTag, params: InvariantRecord, h_sign: int = 1):
    """One joint Gauss-Newton step on ``(T, params)`` for ``N T = T N~(params)``, ``T* H T = H~``.

    Returns the refined record, or ``params`` when the step is not an improvement.
    """
    coords, rebuild = _free_coords(params)
    if not coords:
        return params
    Nt, Ht = template(family, params, h_sign)
    n, m = T.shape
    Im, In = np.eye(m), np.eye(n)
    P = np.eye(m * m)[np.arange(m * m).reshape(m, m).ravel(order="F")]
    sim = np.kron(Im, N) - np.kron(Nt.T, In)
    A = np.kron(Im, T.conj().T @ H)
    zero = np.zeros((m * m, len(coords)))
    h = 1e-6
    dN = np.column_stack([
        -(T @ ((template(family, rebuild(h * e), h_sign)[0] - template(family, rebuild(-h * e), h_sign)[0]) / (2 * h)))
        .ravel(order="F") for e in np.eye(len(coords))
    ])
    J = np.hstack([np.vstack([sim, A + P @ A.conj()]), np.vstack([1j * sim, 1j * (A - P @ A.conj())]),
                   np.vstack([dN, zero])])
    J = np.vstack([J.real, J.imag])
    x = sla.lstsq(J, -_vec_residual(N, H, T, Nt, Ht), lapack_driver="gelsy")[0]
    dp = x[2 * n * m:]
    if not np.all(np.isfinite(dp)) or np.max(np.abs(dp)) > REFINE_MAX_STEP:
        return params
    new = rebuild(dp)
    if constraint_violations(family, new, tol=1e-12):
        return params
    T1 = T + (x[:n * m] + 1j * x[n * m:2 * n * m]).reshape(n, m, order="F")
    Nt1, _ = template(family, new, h_sign)
    if max(residuals(N, H, T1, Nt1, Ht)) >= max(residuals(N, H, T, Nt, Ht)):
        return params
    return new


def finish(block: IndefinitePair, family: FamilyTag, params: InvariantRecord, h_sign: int = 1,
           check_tol: float = 1e-6) -> tuple[CanonicalForm, Certificate]:
    """Instantiate the template, check the record and certify the block against it."""
    bad = constraint_violations(family, params, tol=1e-9)
    if bad:
        raise InternalFormMismatch(f"{family}: extracted parameters violate {bad}", params=params.as_dict())
    Nt, Ht = template(family, params, h_sign)
    cert = certify(block.N, block.H, Nt, Ht)
    refined = refine_params(block.N, block.H, cert.T, family, params, h_sign)
    if refined is not params:
        params = refined
        Nt, Ht = template(family, params, h_sign)
        T = polish(block.N, block.H, cert.T, Nt, Ht)
        cert = Certificate(T, *residuals(block.N, block.H, T, Nt, Ht))
    cf = CanonicalForm(FamilyTag(family), params, Nt, Ht, h_sign)
    scale = max(1.0, max_abs(block.N)) * max(1.0, max_abs(block.H))
    if cert.residual > check_tol * scale:
        raise InternalFormMismatch(f"{family}: certificate residual {cert.residual:.3g}",
                                   residual=cert.residual)
    return cf, cert
