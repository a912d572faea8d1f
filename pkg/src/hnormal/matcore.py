"""Indefinite scalar product primitives on small dense complex matrices."""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import NearSingular, NotHermitian, SingularH, SingularT

DEFAULT_TOL = 1e-9
MAX_DIM = 16


def as_matrix(A) -> np.ndarray:
    """Copy ``A`` into a fresh complex128 2-D array."""
    M = np.array(A, dtype=complex)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {M.shape}")
    return M


def max_abs(A) -> float:
    """Entrywise max norm, the residual norm used throughout."""
    A = np.asarray(A)
    return float(np.max(np.abs(A))) if A.size else 0.0


def sec_diag(n: int) -> np.ndarray:
    """``D_n``: ones on the secondary diagonal."""
    return np.fliplr(np.eye(n, dtype=complex))


def frame_h(s: int, H1=None) -> np.ndarray:
    """``[[0,0,I_s],[0,H1,0],[I_s,0,0]]`` with an optional middle block."""
    H1 = np.zeros((0, 0), dtype=complex) if H1 is None else as_matrix(H1)
    m = H1.shape[0]
    n = 2 * s + m
    H = np.zeros((n, n), dtype=complex)
    H[:s, s + m:] = np.eye(s)
    H[s + m:, :s] = np.eye(s)
    H[s:s + m, s:s + m] = H1
    return H


def hermitian_part(A):
    return (A + A.conj().T) / 2


def _frozen(A):
    A = as_matrix(A)
    A.setflags(write=False)
    return A


@dataclass(frozen=True)
class Signature:
    v_minus: int
    v_plus: int

    @property
    def rank(self) -> int:
        return min(self.v_minus, self.v_plus)

    @property
    def n(self) -> int:
        return self.v_minus + self.v_plus


@dataclass(frozen=True)
class IndefinitePair:
    """An operator ``N`` and the Hermitian invertible ``H`` defining ``[x, y] = (Hx, y)``.

    Construction validates ``H``; H-normality of ``N`` is *not* required here
    (use :func:`is_h_normal`).
    """

    N: np.ndarray
    H: np.ndarray
    tol: float = DEFAULT_TOL
    signature: Signature = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        N = _frozen(self.N)
        H = _frozen(self.H)
        if N.shape[0] != N.shape[1] or H.shape != N.shape:
            raise ValueError(f"N {N.shape} and H {H.shape} must be equal square shapes")
        if not 1 <= N.shape[0] <= MAX_DIM:
            raise ValueError(f"dimension {N.shape[0]} outside 1..{MAX_DIM}")
        if not (np.all(np.isfinite(N)) and np.all(np.isfinite(H))):
            raise ValueError("non-finite entries")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "signature", signature(H, self.tol))

    @property
    def n(self) -> int:
        return self.N.shape[0]

    def with_tol(self, tol):
        return IndefinitePair(self.N, self.H, tol)


def signature(H, tol: float = DEFAULT_TOL) -> Signature:
    """Inertia ``(v-, v+)`` of a Hermitian matrix.

    Raises
    ------
    NotHermitian
        ``max|H - H*| > tol * max(1, max|H|)``.
    NearSingular
        some eigenvalue has modulus ``<= tol``.
    """
    H = as_matrix(H)
    scale = max(1.0, max_abs(H))
    asym = max_abs(H - H.conj().T)
    if asym > tol * scale:
        raise NotHermitian(f"H is not Hermitian (asymmetry {asym:.3g})", asymmetry=asym)
    w = np.linalg.eigvalsh(hermitian_part(H))
    small = np.abs(w) <= tol
    if np.any(small):
        raise NearSingular(
            f"H is singular within tol (smallest |eigenvalue| {np.min(np.abs(w)):.3g})",
            smallest=float(np.min(np.abs(w))),
        )
    return Signature(int(np.sum(w < 0)), int(np.sum(w > 0)))


def h_adjoint(A, H) -> np.ndarray:
    """``A^[*] = H^{-1} A* H``."""
    A = as_matrix(A)
    H = as_matrix(H)
    try:
        return np.linalg.solve(H, A.conj().T @ H)
    except np.linalg.LinAlgError as exc:
        raise SingularH("H is singular") from exc


def commutator_residual(pair: IndefinitePair) -> float:
    Nh = h_adjoint(pair.N, pair.H)
    return max_abs(pair.N @ Nh - Nh @ pair.N)


def normality_scale(pair: IndefinitePair) -> float:
    return max(1.0, max_abs(pair.N) ** 2 * np.linalg.cond(pair.H))


def is_h_normal(pair: IndefinitePair) -> bool:
    """``N N^[*] = N^[*] N`` within ``tol`` scaled by ``max(1, |N|^2 cond(H))``."""
    return commutator_residual(pair) <= pair.tol * normality_scale(pair)


def is_h_unitary(U, H, tol: float = DEFAULT_TOL) -> bool:
    U = as_matrix(U)
    H = as_matrix(H)
    if U.shape != H.shape:
        raise ValueError("shape mismatch")
    return max_abs(U.conj().T @ H @ U - H) <= tol * max(1.0, max_abs(H))


def check_invertible(T, tol: float = DEFAULT_TOL):
    T = as_matrix(T)
    s = np.linalg.svd(T, compute_uv=False)
    if s[-1] <= tol * max(1.0, s[0]):
        raise SingularT(f"transformation is singular within tol (sigma_min {s[-1]:.3g})")
    return T


def conjugate_pair(pair: IndefinitePair, T) -> IndefinitePair:
    """Return ``(T^{-1} N T, T* H T)``."""
    T = check_invertible(T, pair.tol)
    if T.shape != pair.N.shape:
        raise ValueError("shape mismatch")
    N2 = np.linalg.solve(T, pair.N @ T)
    H2 = hermitian_part(T.conj().T @ pair.H @ T)
    return IndefinitePair(N2, H2, pair.tol)


def null_space(A, rtol: float = 1e-8, atol: float = 0.0) -> np.ndarray:
    """Orthonormal basis of the numerical kernel of ``A``.

    Singular values below ``max(atol, rtol * max(1, sigma_max))`` count as zero.
    """
    A = as_matrix(A)
    n = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(n, dtype=complex)
    _, s, Vh = np.linalg.svd(A)
    thresh = max(atol, rtol * max(1.0, s[0] if s.size else 0.0))
    rank = int(np.sum(s > thresh))
    return Vh[rank:].conj().T


def numerical_rank(A, rtol: float = 1e-8) -> int:
    A = as_matrix(A)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > rtol * max(1.0, s[0])))


def block_diag(*blocks) -> np.ndarray:
    return sla.block_diag(*[as_matrix(b) for b in blocks]).astype(complex)
