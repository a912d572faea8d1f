"""Canonical forms of invertible 2x2 complex matrices under congruence ``A -> T A T*``.

Every invertible ``A`` is congruent to exactly one of

* TRIANGULAR ``[[z, rho e^{-i pi/3} z], [0, e^{i pi/3} z]]`` with ``rho >= sqrt 3``
  and ``0 <= arg z < pi`` whenever ``rho > sqrt 3``;
* DIAGONAL ``diag(z1, z2)`` with ``|z1| = |z2| = 1`` and ``arg z1 <= arg z2``
  (arguments taken in ``[0, 2 pi)``).

The class is read off the similarity class of the cosquare ``A A^{-*}``.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import OutOfDomain, SingularT
from .families import SQRT3, W60, arg02pi
from .matcore import as_matrix, max_abs

GAP_TOL = 1e-6


class CongruenceKind(str, enum.Enum):
    TRIANGULAR = "TRIANGULAR"
    DIAGONAL = "DIAGONAL"


@dataclass(frozen=True)
class CongruenceForm2:
    kind: CongruenceKind
    T: np.ndarray
    residual: float
    z: Optional[complex] = None
    rho: Optional[float] = None
    z1: Optional[complex] = None
    z2: Optional[complex] = None

    @property
    def form(self) -> np.ndarray:
        if self.kind is CongruenceKind.TRIANGULAR:
            return triangular_form(self.z, self.rho)
        return np.diag([self.z1, self.z2]).astype(complex)

    def params(self) -> tuple:
        if self.kind is CongruenceKind.TRIANGULAR:
            return (self.z, self.rho)
        return (self.z1, self.z2)


def f_rho(rho: float) -> float:
    """``f(rho) = (1 - rho^2 - sqrt((rho^2 + 1)(rho^2 - 3))) / 2`` for ``rho >= sqrt 3``.

    Written in terms of ``d = rho^2 - 3`` (factored to avoid cancellation) so
    that ``f(sqrt 3) == -1`` holds exactly in floating point.
    """
    if rho < SQRT3:
        raise OutOfDomain(f"rho = {rho!r} below sqrt(3)")
    d = (rho - SQRT3) * (rho + SQRT3)
    return 0.5 * (-2.0 - d - math.sqrt((d + 4.0) * d))


def solve_rho(s: float) -> float:
    """The unique ``rho >= sqrt 3`` with ``f(rho) = s`` (requires ``s <= -1``).

    Squaring ``f(rho) = s`` gives ``rho^2 = 3 + d`` with ``d = -(s + 1)^2 / s``;
    one Newton step on ``f`` polishes the result away from the branch point.
    """
    s = float(s)
    if not s <= -1.0:
        raise OutOfDomain(f"f(rho) = s needs s <= -1, got {s!r}")
    d = -((s + 1.0) ** 2) / s
    rho = math.sqrt(3.0 + d)
    if d > 1e-8:
        root = math.sqrt((d + 4.0) * d)
        fp = -rho - rho * (d + 2.0) / root  # df/drho
        step = (f_rho(rho) - s) / fp
        if abs(step) < 1e-3 * rho:
            rho -= step
    return max(rho, SQRT3)


def triangular_form(z: complex, rho: float) -> np.ndarray:
    return np.array([[z, rho * z / W60], [0, W60 * z]], dtype=complex)


def cosquare(A) -> np.ndarray:
    """``A A^{-*}``; its similarity class is a congruence invariant of ``A``."""
    A = as_matrix(A)
    return np.linalg.solve(A.conj(), A.T).T  # A @ inv(A*)


def _upper_half_sqrt(w: complex) -> complex:
    z = cmath.sqrt(w)
    if cmath.phase(z) < 0 or (z.imag == 0 and z.real < 0):
        z = -z
    if abs(z.imag) < 1e-15 and z.real < 0:
        z = -z
    return z


def _sorted_eig(M):
    w, V = np.linalg.eig(M)
    order = np.argsort(np.abs(w))
    return w[order], V[:, order]


def _finish(kind, A, T, **params) -> CongruenceForm2:
    out = CongruenceForm2(kind=kind, T=T, residual=0.0, **params)
    res = max_abs(T @ A @ T.conj().T - out.form)
    return CongruenceForm2(kind=kind, T=T, residual=res, **params)


def _diagonal_from_hermitian(A, x) -> CongruenceForm2:
    # A = x A*: e^{-i theta/2} A is Hermitian.
    h = cmath.exp(1j * cmath.phase(x) / 2)
    B = A / h
    mu, U = np.linalg.eigh((B + B.conj().T) / 2)
    T = (U / np.sqrt(np.abs(mu))).conj().T
    zs = [h * np.sign(m) for m in mu]
    return _order_diagonal(A, T, zs)


def _order_diagonal(A, T, zs) -> CongruenceForm2:
    zs = [complex(z) for z in zs]
    if arg02pi(zs[0]) > arg02pi(zs[1]):
        zs = zs[::-1]
        T = T[::-1]
    return _finish(CongruenceKind.DIAGONAL, A, np.ascontiguousarray(T), z1=zs[0], z2=zs[1])


def congruence_canonical_2x2(A, tol: float = 1e-12, gap: float = GAP_TOL) -> CongruenceForm2:
    """Canonical congruence form of an invertible 2x2 matrix, with ``T A T* = form``."""
    A = as_matrix(A)
    if A.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    s = np.linalg.svd(A, compute_uv=False)
    if s[-1] <= tol * max(1.0, s[0]):
        raise SingularT("A is singular")
    A = A / s[0]  # congruence by a positive scalar; undone on T below
    scale = 1.0 / math.sqrt(s[0])
    Ap = cosquare(A)
    x, V = _sorted_eig(Ap)
    if abs(x[0] - x[1]) > gap:
        if abs(abs(x[0]) - 1.0) > gap:
            cf = _branch_reciprocal(A, x, V)
        else:
            # unimodular distinct eigenvalues: eigenvectors diagonalize A by congruence
            D = np.linalg.solve(V, np.linalg.solve(V, A.conj().T).conj().T)
            d = np.diag(D)
            T = np.linalg.inv(V) / np.sqrt(np.abs(d))[:, None]
            cf = _order_diagonal(A, T, d / np.abs(d))
    else:
        xm = complex(np.trace(Ap) / 2)
        if max_abs(Ap - xm * np.eye(2)) <= math.sqrt(gap):
            cf = _diagonal_from_hermitian(A, xm)
        else:
            cf = _branch_jordan(A, Ap, xm)
    return CongruenceForm2(kind=cf.kind, T=cf.T * scale, residual=cf.residual,
                           z=cf.z, rho=cf.rho, z1=cf.z1, z2=cf.z2)


def _branch_reciprocal(A, x, V) -> CongruenceForm2:
    x2 = complex(x[1])
    rho = solve_rho(-abs(x2))
    z = _upper_half_sqrt(-(x2 / abs(x2)) / W60)
    F = triangular_form(z, rho)
    xf, VF = _sorted_eig(cosquare(F))
    At = np.linalg.solve(V, np.linalg.solve(V, A.conj().T).conj().T)  # V^-1 A V^-*
    Ft = np.linalg.solve(VF, np.linalg.solve(VF, F.conj().T).conj().T)
    S = np.diag([Ft[0, 1] / At[0, 1], 1.0])
    T = VF @ S @ np.linalg.inv(V)
    return _finish(CongruenceKind.TRIANGULAR, A, T, z=z, rho=rho)


def _branch_jordan(A, Ap, x) -> CongruenceForm2:
    J = Ap - x * np.eye(2)
    _, _, Vh = np.linalg.svd(J)
    v2 = Vh[0].conj()
    v1 = J @ v2
    V = np.column_stack([v1, v2])  # V^-1 A' V = [[x, 1], [0, x]]
    A1 = np.linalg.solve(V, np.linalg.solve(V, A.conj().T).conj().T)
    a = A1[0, 0]
    b = A1[0, 1]
    z = cmath.sqrt(-x / W60)
    if (W60 * a * z.conjugate()).imag < 0:
        z = -z
    zc = z.conjugate()
    im = (a * zc).imag
    T1 = np.array([
        [abs(b), (2 / 3) * 1j * zc * im * abs(b) / b.conjugate()],
        [W60 * zc * b.conjugate(), zc * zc * (-(2 / 3) * 1j * im + a * zc)],
    ]) * (3 ** 0.25) / abs(b) ** 1.5
    T = T1 @ np.linalg.inv(V)
    return _finish(CongruenceKind.TRIANGULAR, A, T, z=z, rho=SQRT3)
