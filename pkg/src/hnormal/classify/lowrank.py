"""Blocks of rank 0 and 1: scalars, and the four small internal forms."""

from __future__ import annotations

import cmath
import math

import numpy as np

from ..decomp import block_eigenvalues, split_S0_S_S1
from ..errors import DecomposableDetected, UnsupportedRank1Form, WrongEigStructure
from ..families import SNAP, FamilyTag, record, unit
from ..matcore import IndefinitePair, max_abs
from .frame import Frame

# A phase counts as real when within this of the real axis (relative).
PHASE_TOL = 1e-7
# Family boundaries read off a sub-block (z = 1, z = i) carry the frame's rounding noise.
BOUNDARY_TOL = 1e-6


def eigen_order_ok(l1: complex, l2: complex) -> bool:
    """``Im(l1 - l2) > 0``, or a real difference with ``Re(l1 - l2) > 0``."""
    d = l1 - l2
    if abs(d.imag) > SNAP:
        return d.imag > 0
    return d.real > 0


def congruence_to(H1, target) -> np.ndarray:
    """``G`` with ``G* H1 G = target`` for Hermitian matrices of equal inertia."""
    w1, Q1 = np.linalg.eigh(H1)
    w2, Q2 = np.linalg.eigh(target)
    # eigh sorts ascending, so signs line up when the inertias agree
    if np.any(np.sign(w1) != np.sign(w2)):
        raise ValueError("inertia mismatch")
    return Q1 @ np.diag(np.sqrt(np.abs(w2) / np.abs(w1))) @ Q2.conj().T


def framed(block: IndefinitePair, H1_target=None) -> Frame:
    """Neutral frame of a one-eigenvalue block, middle block rebased to ``H1_target``."""
    sp = split_S0_S_S1(block)
    f = Frame(sp.transformed_pair.N, sp.transformed_pair.H, sp.s0_dim, sp.lam)
    if f.m:
        target = np.eye(f.m) if H1_target is None else H1_target
        f.scale(G=congruence_to(f.H1, target))
    return f


def rank0(block: IndefinitePair):
    if block.n != 1:
        raise DecomposableDetected("a definite block must be one-dimensional")
    return FamilyTag.RANK0, record(lambda1=block.N[0, 0])


def rank1_two_eig(block: IndefinitePair):
    if block.n != 2:
        raise WrongEigStructure(f"two eigenvalues at rank one need n = 2, got {block.n}")
    a, b = np.linalg.eigvals(block.N)
    l1, l2 = (a, b) if eigen_order_ok(a, b) else (b, a)
    return FamilyTag.RANK1_TWO_EIG, record(lambda1=l1, lambda2=l2)


def rank1_j2(f: Frame):
    w = f.W[0, 0]
    if abs(w) <= SNAP * max(1.0, max_abs(f.M)):
        raise DecomposableDetected("scalar block")
    return FamilyTag.RANK1_J2, record(lambda1=f.lam, z=unit(w))


def n3_internal(a: complex, b: complex, c: complex):
    """Parameters of ``[[0,a,b],[0,0,c],[0,0,0]]`` against ``D_3``.

    Scaling makes both superdiagonal entries equal to a unit ``z`` with
    ``z^2 = a c / |a|^2`` and ``0 <= arg z < pi``; shears move ``b`` along
    real multiples of ``z``.
    """
    if abs(a) == 0 or abs(c) == 0:
        raise DecomposableDetected("superdiagonal vanishes")
    z = cmath.sqrt(unit(a * c))
    if abs(z.imag) <= BOUNDARY_TOL:
        z = 1.0
    elif z.imag < 0:
        z = -z
    bb = b / abs(a) ** 2
    if z == 1.0:
        return FamilyTag.RANK1_N3_B, z, bb.imag
    return FamilyTag.RANK1_N3_A, z, bb.real - bb.imag * z.real / z.imag


def rank1_n3(f: Frame):
    fam, z, r = n3_internal(f.U[0, 0], f.W[0, 0], f.V[0, 0])
    if fam is FamilyTag.RANK1_N3_B:
        return fam, record(lambda1=f.lam, r=r)
    return fam, record(lambda1=f.lam, z=z, r=r)


def rank1_n4(f: Frame):
    if max_abs(f.K) > 1e-7 * max(1.0, max_abs(f.M)):
        raise UnsupportedRank1Form("nonzero middle block in a four-dimensional rank-one block")
    u = f.U[0].conj()
    v = f.V[:, 0]
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise DecomposableDetected("vanishing coupling")
    p = np.vdot(u, v) / (nu * nv)
    if abs(p.imag) > PHASE_TOL or p.real < -PHASE_TOL:
        raise UnsupportedRank1Form(f"coupling phase {cmath.phase(p):.6g} is not covered by the cos/sin form",
                                   phase=cmath.phase(p))
    vh = v / nv
    sin = np.linalg.norm(u / nu - np.vdot(vh, u / nu) * vh)
    alpha = math.atan2(sin, max(p.real, 0.0))
    if alpha <= SNAP:
        raise DecomposableDetected("parallel coupling vectors")
    return FamilyTag.RANK1_N4, record(lambda1=f.lam, alpha=min(alpha, math.pi / 2))


def classify_low_rank(block: IndefinitePair):
    """``(family, record)`` of an indecomposable block of rank 0 or 1 (``H`` already sign-fixed)."""
    k = block.signature.rank
    if k == 0:
        return rank0(block)
    eigs = block_eigenvalues(block.N)
    if len(eigs) == 2:
        return rank1_two_eig(block)
    if len(eigs) != 1:
        raise WrongEigStructure(f"{len(eigs)} eigenvalues in an indecomposable block")
    if block.n == 2:
        return rank1_j2(framed(block))
    if block.n == 3:
        return rank1_n3(framed(block))
    if block.n == 4:
        return rank1_n4(framed(block))
    raise UnsupportedRank1Form(f"rank-one block of size {block.n}")
