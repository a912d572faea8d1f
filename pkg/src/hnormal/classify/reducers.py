"""Rank-two reducers: extract the invariants of an indecomposable block.

Each reducer moves the block into its neutral frame, normalizes with frame
moves until the template entries can be read, and hands the record to
:func:`finish`, which certifies it.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
import scipy.linalg as sla

from ..congr2 import CongruenceKind, congruence_canonical_2x2
from ..decomp import TriSplit, block_eigenvalues
from ..errors import (
    DecomposableDetected,
    ImpossibleCase,
    InternalFormMismatch,
    S0NotNeutral,
    WrongEigStructure,
)
from ..families import SNAP, SQRT3, FamilyTag, record, unit
from ..matcore import IndefinitePair, max_abs
from .forms import finish
from .frame import Frame
from .lowrank import BOUNDARY_TOL, congruence_to, eigen_order_ok

HALF_PI = math.pi / 2
JORDAN_RTOL = 1e-7


def _frame(split: TriSplit) -> Frame:
    tp = split.transformed_pair
    return Frame(tp.N, tp.H, split.s0_dim, split.lam)


def _scale_of(f: Frame) -> float:
    return max(1.0, max_abs(f.M))


def _shear_solve(f: Frame, free: list[int], target) -> None:
    """Shear with ``P[0, free]`` chosen so the affine ``target(f)`` vanishes (least squares)."""
    base = np.atleast_1d(target(f))
    cols = []
    for j in free:
        for d in (1.0, 1j):
            g = Frame(f.M, f.Hf, f.s, f.lam)
            P = np.zeros((f.s, f.m), dtype=complex)
            P[0, j] = d
            g.shear(P)
            cols.append(np.atleast_1d(target(g)) - base)
    J = np.array(cols).T
    A = np.vstack([J.real, J.imag])
    b = -np.concatenate([base.real, base.imag])
    x = np.linalg.lstsq(A, b, rcond=None)[0]
    P = np.zeros((f.s, f.m), dtype=complex)
    for k, j in enumerate(free):
        P[0, j] = x[2 * k] + 1j * x[2 * k + 1]
    f.shear(P)


# --- two eigenvalues -----------------------------------------------------------

def _root_space(N, mu, other):
    """Orthonormal basis of the root subspace of the eigenvalue nearest ``mu``."""
    _, Z, sdim = sla.schur(N, output="complex", sort=lambda e: abs(e - mu) < abs(e - other))
    return Z[:, :sdim]


def reduce_two_eigenvalues(block: IndefinitePair, h_sign: int = 1):
    eigs = block_eigenvalues(block.N)
    if len(eigs) != 2 or block.n != 4:
        raise WrongEigStructure(f"expected two eigenvalues on C^4, got {len(eigs)} on C^{block.n}")
    N, H = block.N, h_sign * block.H
    a, b = eigs
    Qa, Qb = _root_space(N, a, b), _root_space(N, b, a)
    if Qa.shape[1] != 2 or Qb.shape[1] != 2:
        raise WrongEigStructure("root subspaces must both be two-dimensional")
    sc = max(1.0, max_abs(N))
    jordan = [max_abs((N - mu * np.eye(4)) @ Q) > JORDAN_RTOL * sc for mu, Q in ((a, Qa), (b, Qb))]
    if not any(jordan):
        raise DecomposableDetected("both eigenvalues are semisimple")
    if all(jordan):
        first = 0 if eigen_order_ok(a, b) else 1
    else:
        first = 0 if jordan[0] else 1
    (l1, Q1), (l2, Q2) = [((a, Qa), (b, Qb)), ((b, Qb), (a, Qa))][first]
    J = (N - l1 * np.eye(4)) @ Q1
    _, _, Vh = np.linalg.svd(J)
    y = Q1 @ Vh[0].conj()
    E = np.column_stack([(N - l1 * np.eye(4)) @ y, y])
    F = Q2 @ np.linalg.inv(E.conj().T @ H @ Q2)
    T = np.hstack([E, F])
    B = np.linalg.solve(T, N @ T)
    x = B[3, 2]
    lam1 = np.trace(B[:2, :2]) / 2
    lam2 = np.trace(B[2:, 2:]) / 2
    if abs(x) <= SNAP * sc:
        x = 0.0
    p = record(lambda1=lam1, lambda2=lam2, x=x)
    return finish(block, FamilyTag.TWO_EIG, p, h_sign)


# --- one eigenvalue, dim S0 = 1 -----------------------------------------------------

def _internal_blocks(split: TriSplit):
    from .driver import classify_pair

    return classify_pair(split.internal_pair)


def _to_internal(f: Frame, split: TriSplit, layout) -> list:
    """Rebase the middle block onto canonical internal blocks arranged by ``layout``."""
    blocks = _internal_blocks(split)
    G, kinds = layout(blocks)
    f.scale(G=G)
    return kinds


def _layout_single(blocks):
    if len(blocks) != 1:
        raise DecomposableDetected("internal operator decomposes")
    cf, cert = blocks[0]
    return cert.T, [cf]


def reduce_dim1_indec(block: IndefinitePair, split: TriSplit, h_sign: int = 1):
    """``dim S0 = 1`` with an indecomposable internal operator."""
    n = block.n
    if split.s0_dim != 1:
        raise S0NotNeutral(f"expected dim S0 = 1, got {split.s0_dim}")
    if n == 6:
        raise ImpossibleCase("an indecomposable internal operator of size four cannot occur with dim S0 = 1")
    if n not in (4, 5):
        raise ImpossibleCase(f"dim S0 = 1 with indecomposable internal operator on C^{n}")
    f = _frame(split)
    (cf,) = _to_internal(f, split, _layout_single)
    if n == 4:
        if cf.family is not FamilyTag.RANK1_J2:
            raise InternalFormMismatch(f"internal form {cf.family} on C^2")
        z = cf.params.z
        f.scale(A=[[f.U[0, 0]]])
        _shear_solve(f, [0], lambda g: g.V[0, 0])
        p = record(lambda1=f.lam, z=z, r1=f.U[0, 1].imag, r2=(f.W[0, 0] * z.conjugate()).imag)
        return finish(block, FamilyTag.D1_IND_N4, p, h_sign)
    if cf.family not in (FamilyTag.RANK1_N3_A, FamilyTag.RANK1_N3_B):
        raise InternalFormMismatch(f"internal form {cf.family} on C^3")
    f.scale(A=[[f.U[0, 0]]])
    _shear_solve(f, [0, 1], lambda g: g.U[0, 1:])
    w, v0 = f.W[0, 0], f.V[0, 0]
    r1 = cf.params.r
    if cf.family is FamilyTag.RANK1_N3_B:
        p = record(lambda1=f.lam, r1=r1, r2=v0.imag, r3=w.imag)
        return finish(block, FamilyTag.D1_IND_N5_A, p, h_sign)
    z = cf.params.z
    if abs(z - 1j) <= BOUNDARY_TOL:
        z = 1j
        p = record(lambda1=f.lam, r1=r1, r2=v0.imag, r3=w.real)
        return finish(block, FamilyTag.D1_IND_N5_C, p, h_sign)
    r3 = (w * z.conjugate()).imag / z.real
    p = record(lambda1=f.lam, z=z, r1=r1, r2=(v0 * z.conjugate() ** 2).imag, r3=r3)
    return finish(block, FamilyTag.D1_IND_N5_B, p, h_sign)


def _layout_two_scalars(blocks):
    if len(blocks) != 2 or any(cf.family is not FamilyTag.RANK0 for cf, _ in blocks):
        raise DecomposableDetected("internal operator is not a pair of opposite scalars")
    (c1, t1), (c2, t2) = sorted(blocks, key=lambda b: -b[0].h_sign)
    if c1.h_sign != 1 or c2.h_sign != -1:
        raise InternalFormMismatch("internal scalars must have opposite signs")
    G = np.hstack([t1.T, t2.T]) @ (np.array([[1, 1], [1, -1]]) / math.sqrt(2))
    return G, [c1, c2]


def _layout_chain_plus_scalar(chain_size):
    def layout(blocks):
        if len(blocks) != 2:
            raise DecomposableDetected("internal operator splits further")
        chain = [b for b in blocks if b[0].n == chain_size]
        scal = [b for b in blocks if b[0].family is FamilyTag.RANK0 and b[0].h_sign == 1]
        if len(chain) != 1 or len(scal) != 1:
            raise DecomposableDetected("internal operator is not a chain plus a scalar")
        (cc, tc), (_, ts) = chain[0], scal[0]
        if chain_size == 2:
            G = np.column_stack([tc.T[:, 0], ts.T[:, 0], tc.T[:, 1]])
        else:
            G = np.hstack([tc.T, ts.T])
        return G, [cc]
    return layout


def reduce_dim1_dec(block: IndefinitePair, split: TriSplit, h_sign: int = 1):
    """``dim S0 = 1`` with a decomposable internal operator."""
    n = block.n
    if split.s0_dim != 1:
        raise S0NotNeutral(f"expected dim S0 = 1, got {split.s0_dim}")
    if n == 7 or n > 7:
        raise ImpossibleCase(f"dim S0 = 1 and a decomposable internal operator on C^{n}")
    f = _frame(split)
    sc = _scale_of(f)
    if n == 4:
        _to_internal(f, split, _layout_two_scalars)
        if max_abs(f.K) > JORDAN_RTOL * sc:
            raise InternalFormMismatch("internal part is not scalar")
        U, V = f.U[0], f.V[:, 0]
        s = 2 * (U[0] * U[1].conjugate()).real
        uv = U @ V
        if abs(uv) <= SNAP * sc:
            raise DecomposableDetected("vanishing coupling")
        ratio = s / abs(uv)
        if abs(ratio) <= SNAP:
            return finish(block, FamilyTag.D1_DEC_N4_A, record(lambda1=f.lam, z=unit(uv)), h_sign)
        P = 2 * uv / abs(s)
        r = math.sqrt(max(abs(P) ** 2 - 4.0, 0.0))
        if r <= SNAP:
            raise DecomposableDetected("r = 0 gives an invariant nondegenerate subspace")
        fam = FamilyTag.D1_DEC_N4_B if s > 0 else FamilyTag.D1_DEC_N4_C
        return finish(block, fam, record(lambda1=f.lam, z=unit(P / (2 + 1j * r)), r=r), h_sign)
    if n == 5:
        (cf,) = _to_internal(f, split, _layout_chain_plus_scalar(2))
        z = cf.params.z
        f.scale(A=[[f.U[0, 0]]])
        g = f.U[0, 1]
        mix = np.array([[1, -g, -abs(g) ** 2 / 2], [0, 1, g.conjugate()], [0, 0, 1]])
        f.scale(G=mix)
        _shear_solve(f, [0], lambda h: h.V[0, 0])
        r1 = abs(f.V[1, 0])
        if r1 <= SNAP * sc:
            raise DecomposableDetected("scalar part decouples")
        p = record(lambda1=f.lam, z=z, r1=r1, r2=f.U[0, 2].imag)
        return finish(block, FamilyTag.D1_DEC_N5, p, h_sign)
    if n == 6:
        (cf,) = _to_internal(f, split, _layout_chain_plus_scalar(3))
        f.scale(A=[[f.U[0, 0]]])
        g = f.U[0, 3]
        mix = np.eye(4, dtype=complex)
        mix[0, 3] = -g
        mix[3, 2] = g.conjugate()
        mix[0, 2] = -abs(g) ** 2 / 2
        f.scale(G=mix)
        _shear_solve(f, [0, 1], lambda h: np.array([h.V[1, 0], h.U[0, 2]]))
        r2 = abs(f.V[3, 0])
        if r2 <= SNAP * sc:
            raise DecomposableDetected("scalar part decouples")
        v0 = f.V[0, 0]
        r1 = cf.params.r
        if cf.family is FamilyTag.RANK1_N3_B:
            p = record(lambda1=f.lam, r1=r1, r2=r2, r3=v0.imag)
            return finish(block, FamilyTag.D1_DEC_N6_A, p, h_sign)
        z = cf.params.z
        p = record(lambda1=f.lam, z=z, r1=r1, r2=r2, r3=(v0 * z.conjugate() ** 2).imag)
        return finish(block, FamilyTag.D1_DEC_N6_B, p, h_sign)
    raise ImpossibleCase(f"dim S0 = 1 block on C^{n}")


# --- one eigenvalue, dim S0 = 2 ---------------------------------------------------------

def _snap_angle(a: float, to: float) -> float:
    return to if abs(a - to) <= SNAP else a


def reduce_dim2(block: IndefinitePair, split: TriSplit, h_sign: int = 1):
    n = block.n
    if split.s0_dim != 2:
        raise S0NotNeutral(f"expected dim S0 = 2, got {split.s0_dim}")
    f = _frame(split)
    if f.m:
        w = np.linalg.eigvalsh(f.H1)
        if np.any(w <= 0):
            raise InternalFormMismatch("middle block of H must be positive definite")
        f.scale(G=congruence_to(f.H1, np.eye(f.m)))
    sc = _scale_of(f)
    if max_abs(f.K) > JORDAN_RTOL * sc:
        raise InternalFormMismatch("internal operator on a definite space must be scalar")
    if n == 4:
        return _dim2_n4(block, f, h_sign)
    if n == 5:
        return _dim2_n5(block, f, h_sign)
    if n == 6:
        raise DecomposableDetected("with dim S0 = 2 on C^6 a shear and a unitary rotation always split the block")
    if n in (7, 8):
        U = f.U
        s = np.linalg.svd(U, compute_uv=False)
        if s[-1] <= JORDAN_RTOL * sc:
            raise DecomposableDetected("coupling from S0 has rank one")
        Q, sv, Rh = np.linalg.svd(U)
        G = Rh.conj().T  # columns: right singular vectors, completed
        f.scale(A=Q @ np.diag(sv), G=G)
        return (_dim2_n7 if n == 7 else _dim2_n8)(block, f, h_sign)
    raise ImpossibleCase(f"dim S0 = 2 block on C^{n}")


def _dim2_n4(block, f: Frame, h_sign):
    Wm = f.W
    sc = _scale_of(f)
    sv = np.linalg.svd(Wm, compute_uv=False)
    if sv[0] <= JORDAN_RTOL * sc:
        raise DecomposableDetected("scalar block")
    if sv[1] <= SNAP * sv[0]:
        Uu, _, Vh = np.linalg.svd(Wm)
        a, b = Uu[:, 0], Vh[0].conj()
        if abs(abs(np.vdot(a, b)) - 1) <= SNAP:
            raise DecomposableDetected("rank-one coupling with parallel factors")
        return finish(block, FamilyTag.D2_N4_B, record(lambda1=f.lam), h_sign)
    cf = congruence_canonical_2x2(Wm)
    if cf.kind is CongruenceKind.DIAGONAL:
        raise DecomposableDetected("diagonal congruence form")
    rho = SQRT3 if abs(cf.rho - SQRT3) <= SNAP else cf.rho
    return finish(block, FamilyTag.D2_N4_A, record(lambda1=f.lam, z=cf.z, r=rho), h_sign)


def _dim2_n5(block, f: Frame, h_sign):
    u = f.U[:, 0]
    v = f.V[0]
    nu2 = np.vdot(u, u).real
    sc = _scale_of(f)
    if nu2 <= (JORDAN_RTOL * sc) ** 2:
        raise DecomposableDetected("vanishing coupling")
    zeta = unit(v @ u)
    perp = np.array([-u[1].conjugate(), u[0].conjugate()]) / math.sqrt(nu2)
    Ai = np.vstack([u.conj() / nu2, perp.conj()])
    W = Ai @ f.W @ Ai.conj().T
    w11 = W[1, 1]
    w10 = W[1, 0] - zeta * W[0, 1].conjugate()
    if abs(w10) <= JORDAN_RTOL * max(1.0, max_abs(W)):
        raise DecomposableDetected("e'' = 0")
    if abs(w11) <= SNAP * abs(w10) ** 2:
        return finish(block, FamilyTag.D2_N5_A, record(lambda1=f.lam, z=zeta), h_sign)
    z = unit(w11)
    if abs(z * z - zeta) > 1e-6:
        raise DecomposableDetected("z1^2 != z")
    r = abs(w10) / math.sqrt(abs(w11))
    return finish(block, FamilyTag.D2_N5_B, record(lambda1=f.lam, z=z, r=r), h_sign)


def _align_pair(V1, strong: bool):
    """Phase ``diag(1, e^{i phi})`` making ``V1[0,1]`` (or ``V1[1,0]``) real positive."""
    if strong:
        phi = -cmath.phase(V1[0, 1])
    else:
        phi = cmath.phase(V1[1, 0])
    D = np.diag([1.0, cmath.exp(1j * phi)])
    return D.conj().T @ V1 @ D, D


def _dim2_n7(block, f: Frame, h_sign):
    V = f.V
    V1, v3 = V[:2], V[2]
    nv3 = np.linalg.norm(v3)
    if nv3 <= SNAP:
        raise DecomposableDetected("sin(beta) = 0")
    a2 = v3.conj() / nv3
    a1 = np.array([-a2[1].conjugate(), a2[0].conjugate()])
    A = np.column_stack([a1, a2])
    V1 = A.conj().T @ V1 @ A
    cb = np.linalg.norm(V1[:, 1])
    beta = _snap_angle(math.atan2(nv3, cb), HALF_PI)
    V1, _ = _align_pair(V1, beta < HALF_PI)
    alpha = _snap_angle(math.atan2(abs(V1[1, 0]), abs(V1[0, 0])), HALF_PI)
    if alpha <= SNAP:
        raise DecomposableDetected("alpha = 0")
    z1 = 1.0 if beta == HALF_PI else unit(V1[1, 0])
    z2 = 1.0 if alpha == HALF_PI else unit(-V1[0, 0].conjugate() * z1)
    p = record(lambda1=f.lam, z1=z1, z2=z2, alpha=alpha, beta=beta)
    return finish(block, FamilyTag.D2_N7, p, h_sign)


def _dim2_n8(block, f: Frame, h_sign):
    V = f.V
    V1, V3 = V[:2], V[2:]
    P, sv, Qh = np.linalg.svd(V3)
    P, sv, Q = P[:, ::-1], sv[::-1], Qh.conj().T[:, ::-1]
    if abs(sv[1] - sv[0]) <= SNAP:
        raise DecomposableDetected("r1 = r2")
    if sv[0] <= SNAP:
        raise DecomposableDetected("sin(beta) = 0")
    V1 = Q.conj().T @ V1 @ Q
    cb = np.linalg.norm(V1[:, 0])
    cg = np.linalg.norm(V1[:, 1])
    beta = math.atan2(sv[0], cb)
    gamma = _snap_angle(math.atan2(sv[1], cg), HALF_PI)
    V1, _ = _align_pair(V1, gamma < HALF_PI)
    alpha = math.atan2(abs(V1[0, 0]), abs(V1[1, 0]))
    alpha = 0.0 if alpha <= SNAP else alpha
    z1 = 1.0 if gamma == HALF_PI else unit(V1[1, 0])
    z2 = 1.0 if alpha == 0.0 else unit(-V1[0, 0].conjugate() * z1)
    p = record(lambda1=f.lam, z1=z1, z2=z2, alpha=alpha, beta=beta, gamma=gamma)
    return finish(block, FamilyTag.D2_N8, p, h_sign)
