"""Orthogonal splitting of H-normal operators and the neutral three-block frame.

A nondegenerate subspace invariant under both ``N`` and ``N^[*]`` is the
spectral subspace of some H-selfadjoint element of the algebra commuting with
``N`` and ``N^[*]``.  :func:`split_orthogonal` draws random such elements and
splits along their eigenvalue classes ``{mu, conj(mu)}`` until nothing splits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import EmptyS0, NotHNormal, S0NotNeutral
from .matcore import (
    IndefinitePair,
    as_matrix,
    commutator_residual,
    h_adjoint,
    hermitian_part,
    is_h_normal,
    max_abs,
    null_space,
)

KERNEL_RTOL = 1e-7
CLUSTER_RADIUS = 0.05
DRAWS = 9


@dataclass(frozen=True)
class Block:
    """One orthogonal summand: orthonormal ``basis`` columns and the restricted pair."""

    basis: np.ndarray
    pair: IndefinitePair


@dataclass(frozen=True)
class BlockDecomposition:
    blocks: list
    combining_transform: np.ndarray = field(repr=False)

    def reassembly_residual(self, pair: IndefinitePair) -> float:
        """``max |T^-1 N T - (+) N_i|`` and the same for ``H``, whichever is larger."""
        T = self.combining_transform
        Nb = sla.block_diag(*[b.pair.N for b in self.blocks])
        Hb = sla.block_diag(*[b.pair.H for b in self.blocks])
        rN = max_abs(np.linalg.solve(T, pair.N @ T) - Nb)
        rH = max_abs(T.conj().T @ pair.H @ T - Hb)
        return max(rN, rH)


@dataclass(frozen=True)
class TriSplit:
    """Neutral frame ``C^n = S0 + S + S1`` with ``T* H T = [[0,0,I],[0,H1,0],[I,0,0]]``."""

    s0_dim: int
    lam: complex
    transform: np.ndarray = field(repr=False)
    transformed_pair: IndefinitePair = field(repr=False)
    internal_pair: IndefinitePair | None = field(repr=False)

    @property
    def internal_dim(self) -> int:
        return self.transformed_pair.n - 2 * self.s0_dim


# --- spectra ---------------------------------------------------------------

def _scale(N) -> float:
    return max(1.0, max_abs(N))


def eigenvalue_clusters(N, radius: float | None = None) -> list[tuple[complex, int]]:
    """Group eigenvalues by single linkage; returns ``(centroid, multiplicity)``.

    The radius is generous (Jordan chains smear eigenvalues by roughly
    ``eps^(1/k)``); centroids of full clusters are accurate since they are traces
    of spectral projections.
    """
    N = as_matrix(N)
    w = np.linalg.eigvals(N)
    rad = (CLUSTER_RADIUS if radius is None else radius) * _scale(N)
    groups = _link(w, rad)
    return [(complex(np.mean(w[g])), len(g)) for g in groups]


def _link(w, rad) -> list[list[int]]:
    n = len(w)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(w[i] - w[j]) <= rad:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: min(g))


def is_single_eigenvalue(N, rtol: float = 1e-9) -> bool:
    """True when ``N - mean(eig) I`` is nilpotent within ``rtol``."""
    N = as_matrix(N)
    n = N.shape[0]
    s = _scale(N)
    mu = np.trace(N) / n
    P = np.linalg.matrix_power((N - mu * np.eye(n)) / s, n)
    return max_abs(P) <= rtol


def block_eigenvalues(N) -> list[complex]:
    """Distinct eigenvalues of a small block that has at most a handful of them."""
    N = as_matrix(N)
    n = N.shape[0]
    if is_single_eigenvalue(N):
        return [complex(np.trace(N) / n)]
    w = np.linalg.eigvals(N)
    # two-means seeded with the farthest pair
    i, j = np.unravel_index(np.argmax(np.abs(w[:, None] - w[None, :])), (n, n))
    lab = np.abs(w - w[i]) > np.abs(w - w[j])
    cl = _link(w, CLUSTER_RADIUS * _scale(N))
    if len(cl) > 2:
        return [complex(np.mean(w[g])) for g in cl]
    return [complex(np.mean(w[~lab])), complex(np.mean(w[lab]))]


# --- commutant and splitting ---------------------------------------------------

def commutant_basis(N, Nh, rtol: float = KERNEL_RTOL) -> list[np.ndarray]:
    """Basis of ``{X : XN = NX, X Nh = Nh X}``."""
    n = N.shape[0]
    I = np.eye(n)
    K = np.vstack([np.kron(I, N) - np.kron(N.T, I), np.kron(I, Nh) - np.kron(Nh.T, I)])
    Z = null_space(K, rtol=rtol)
    return [Z[:, k].reshape(n, n, order="F") for k in range(Z.shape[1])]


def _orth(V) -> np.ndarray:
    Q, _ = np.linalg.qr(V)
    return Q


def _class_subspaces(X, rad):
    """Spectral subspaces of ``X`` for eigenvalue classes closed under conjugation."""
    w = np.linalg.eigvals(X)
    groups = _link(w, rad)
    cents = [np.mean(w[g]) for g in groups]
    # merge each cluster with the cluster holding its conjugate
    k = len(groups)
    parent = list(range(k))

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a

    for a in range(k):
        for b in range(a + 1, k):
            if abs(np.conj(cents[a]) - cents[b]) <= rad:
                parent[find(b)] = find(a)
    classes: dict[int, list[int]] = {}
    for a in range(k):
        classes.setdefault(find(a), []).append(a)
    if len(classes) < 2:
        return None
    out = []
    for members in classes.values():
        mine = [cents[a] for a in members]
        others = [cents[a] for a in range(k) if a not in members]

        def pick(e, mine=mine, others=others):
            return min(abs(e - c) for c in mine) < min(abs(e - c) for c in others)

        _, Z, sdim = sla.schur(X, output="complex", sort=pick)
        expect = sum(len(groups[a]) for a in members)
        if sdim != expect:
            return None
        out.append(Z[:, :sdim])
    return out


def _valid_split(N, Nh, H, parts, tol) -> bool:
    scale = _scale(N)
    for i, V in enumerate(parts):
        G = V.conj().T @ H @ V
        if np.min(np.abs(np.linalg.eigvalsh(hermitian_part(G)))) <= 1e-6 * max(1.0, max_abs(H)):
            return False
        P = np.eye(N.shape[0]) - V @ V.conj().T
        if max_abs(P @ N @ V) > 1e-6 * scale or max_abs(P @ Nh @ V) > 1e-6 * scale:
            return False
        for W in parts[i + 1:]:
            if max_abs(V.conj().T @ H @ W) > 1e-6 * max(1.0, max_abs(H)):
                return False
    return True


def _try_split(N, H, rng, draws, tol):
    Nh = h_adjoint(N, H)
    C = commutant_basis(N, Nh)
    if len(C) <= 1:
        return None
    Hinv = np.linalg.inv(H)
    for k in range(draws):
        c = rng.normal(size=len(C)) + 1j * rng.normal(size=len(C))
        Y = sum(ci * Ci for ci, Ci in zip(c, C))
        Ya = Hinv @ Y.conj().T @ H
        # alternate the selfadjoint element; any one of them may have a nonreal spectrum
        X = (Y + Ya, 1j * (Y - Ya), Ya @ Y)[k % 3]
        X = X / max(np.linalg.norm(X), 1e-300)
        parts = _class_subspaces(X, CLUSTER_RADIUS)
        if parts is not None and _valid_split(N, Nh, H, parts, tol):
            return parts
    return None


def _is_scalar(N) -> bool:
    mu = np.trace(N) / N.shape[0]
    return max_abs(N - mu * np.eye(N.shape[0])) <= 1e-9 * _scale(N)


def _s0_dimension_one(N, H) -> bool:
    if not is_single_eigenvalue(N):
        return False
    lam = np.trace(N) / N.shape[0]
    try:
        return _s0_basis(N, H, lam).shape[1] == 1
    except EmptyS0:
        return False


def split_orthogonal(pair: IndefinitePair, seed: int = 0, draws: int = DRAWS,
                     s0_shortcut: bool = True) -> BlockDecomposition:
    """Split into mutually H-orthogonal, jointly invariant, indecomposable blocks.

    A one-eigenvalue block whose joint eigenspace ``S0`` is one-dimensional is
    always indecomposable, so by default it is kept without searching the
    commutant; ``s0_shortcut=False`` searches anyway (used to test that fact).
    Blocks are returned in a deterministic order (by first eigenvalue, then size).
    """
    if not is_h_normal(pair):
        raise NotHNormal("operator is not H-normal", residual=commutator_residual(pair))
    rng = np.random.default_rng(seed)
    N, H = pair.N, pair.H
    bases = []
    stack = [np.eye(pair.n, dtype=complex)]
    while stack:
        V = stack.pop()
        Ns = V.conj().T @ N @ V
        Hs = hermitian_part(V.conj().T @ H @ V)
        if V.shape[1] == 1 or (s0_shortcut and _s0_dimension_one(Ns, Hs)):
            bases.append(V)
            continue
        if _is_scalar(Ns):
            # every subspace is invariant: split along an eigenbasis of H
            _, Q = np.linalg.eigh(Hs)
            stack.extend(V @ Q[:, [j]] for j in range(V.shape[1]))
            continue
        parts = _try_split(Ns, Hs, rng, draws, pair.tol)
        if parts is None:
            bases.append(V)
        else:
            stack.extend(_orth(V @ P) for P in parts)
    blocks = []
    for V in bases:
        Ns = V.conj().T @ N @ V
        Hs = hermitian_part(V.conj().T @ H @ V)
        blocks.append(Block(V, IndefinitePair(Ns, Hs, pair.tol)))
    blocks.sort(key=lambda b: _block_key(b.pair))
    T = np.hstack([b.basis for b in blocks])
    return BlockDecomposition(blocks, T)


def _block_key(p: IndefinitePair):
    lam = complex(np.trace(p.N) / p.n)
    return (-p.n, round(lam.real, 6), round(lam.imag, 6))


# --- the neutral frame -----------------------------------------------------------

def _s0_basis(N, H, lam, rtol: float = KERNEL_RTOL) -> np.ndarray:
    n = N.shape[0]
    Nh = h_adjoint(N, H)
    A = np.vstack([N - lam * np.eye(n), Nh - np.conj(lam) * np.eye(n)])
    X = null_space(A / _scale(N), rtol=rtol)
    if X.shape[1] == 0:
        raise EmptyS0(f"no joint eigenvector for lambda = {lam}")
    return X


def compute_S0(pair: IndefinitePair, lam: complex) -> np.ndarray:
    """Orthonormal basis of ``ker(N - lam) & ker(N^[*] - conj(lam))``."""
    return _s0_basis(pair.N, pair.H, complex(lam))


def neutral_frame(H, X):
    """Complete a neutral basis ``X`` to ``T = [X Z Y]`` with
    ``T* H T = [[0,0,I],[0,H1,0],[I,0,0]]``; returns ``(T, H1)``."""
    H = as_matrix(H)
    HX = H @ X
    Y0 = HX @ np.linalg.inv(HX.conj().T @ HX)
    Y = Y0 - X @ hermitian_part(Y0.conj().T @ H @ Y0) / 2
    XY = np.hstack([X, Y])
    Z = null_space((H @ XY).conj().T, rtol=1e-10)
    H1 = hermitian_part(Z.conj().T @ H @ Z)
    return np.hstack([X, Z, Y]), H1


def split_S0_S_S1(pair: IndefinitePair, lam: complex | None = None) -> TriSplit:
    """Neutral frame built on the joint eigenspace ``S0`` of a one-eigenvalue pair."""
    N, H = pair.N, pair.H
    n = pair.n
    if lam is None:
        lam = complex(np.trace(N) / n)
    X = _s0_basis(N, H, lam)
    s = X.shape[1]
    gram = X.conj().T @ H @ X
    if max_abs(gram) > 1e-7 * max(1.0, max_abs(H)) or 2 * s > n:
        raise S0NotNeutral("S0 is not neutral; split the pair first", gram=max_abs(gram))
    T, H1 = neutral_frame(H, X)
    M = np.linalg.solve(T, N @ T)
    Hf = hermitian_part(T.conj().T @ H @ T)
    tp = IndefinitePair(M, Hf, pair.tol)
    m = n - 2 * s
    internal = None
    if m:
        internal = IndefinitePair(M[s:s + m, s:s + m], H1, pair.tol)
    return TriSplit(s, complex(lam), T, tp, internal)


def frame_residual(split: TriSplit) -> float:
    """Distance of the transformed pair from the block-triangular frame shape."""
    s = split.s0_dim
    M = split.transformed_pair.N
    Hf = split.transformed_pair.H
    n = M.shape[0]
    m = n - 2 * s
    lam = split.lam
    target = np.zeros((n, n), dtype=complex)
    target[:s, n - s:] = np.eye(s)
    target[n - s:, :s] = np.eye(s)
    if m:
        target[s:s + m, s:s + m] = Hf[s:s + m, s:s + m]
    r = max_abs(Hf - target)
    low = np.tril(np.ones((n, n), dtype=bool), -1)
    blk = np.zeros((n, n), dtype=bool)
    blk[s:s + m, s:s + m] = True
    r = max(r, max_abs(M[low & ~blk]))
    r = max(r, max_abs(M[:s, :s] - lam * np.eye(s)), max_abs(M[n - s:, n - s:] - lam * np.eye(s)))
    return r


def block_size_law_holds(block: IndefinitePair) -> bool:
    """Dimension law for an indecomposable block of rank ``k``:
    ``n = 2k`` with two eigenvalues, ``2k <= n <= 4k`` with one (``n = 1`` when ``k = 0``)."""
    k = block.signature.rank
    n = block.n
    eigs = block_eigenvalues(block.N)
    if k == 0:
        return n == 1
    if len(eigs) == 2:
        return n == 2 * k
    if len(eigs) == 1:
        return 2 * k <= n <= 4 * k
    return False
