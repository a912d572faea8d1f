"""Top-level classification: split, dispatch each block, compare pairs."""

from __future__ import annotations

import numpy as np

from ..decomp import block_eigenvalues, split_orthogonal, split_S0_S_S1
from ..errors import DecomposableDetected, RankTooHigh, WrongEigStructure
from ..families import param_distance
from ..matcore import IndefinitePair
from .forms import CanonicalForm, Certificate, finish
from .lowrank import classify_low_rank
from .reducers import reduce_dim1_dec, reduce_dim1_indec, reduce_dim2, reduce_two_eigenvalues

PARAM_TOL = 1e-6
RESPLIT_SEEDS = (1, 2, 3)


def _sign_of(pair: IndefinitePair) -> int:
    sig = pair.signature
    return -1 if sig.v_minus > sig.v_plus else 1


def classify_block(block: IndefinitePair) -> tuple[CanonicalForm, Certificate]:
    """Canonical form of one indecomposable block."""
    h_sign = _sign_of(block)
    work = IndefinitePair(block.N, h_sign * block.H, block.tol)
    k = block.signature.rank
    if k > 2:
        raise RankTooHigh(f"rank {k} exceeds two", rank=k)
    if k < 2:
        fam, p = classify_low_rank(work)
        return finish(block, fam, p, h_sign)
    eigs = block_eigenvalues(block.N)
    if len(eigs) == 2:
        return reduce_two_eigenvalues(block, h_sign)
    if len(eigs) != 1:
        raise WrongEigStructure(f"{len(eigs)} eigenvalues in an indecomposable rank-two block")
    split = split_S0_S_S1(work)
    if split.s0_dim == 2:
        return reduce_dim2(block, split, h_sign)
    if split.internal_pair is not None and split.internal_pair.n > 1 and \
            len(split_orthogonal(split.internal_pair).blocks) > 1:
        return reduce_dim1_dec(block, split, h_sign)
    return reduce_dim1_indec(block, split, h_sign)


def _embed(basis, cf, cert) -> tuple[CanonicalForm, Certificate]:
    T = basis @ cert.T
    return cf, Certificate(T, cert.residual_similarity, cert.residual_congruence)


def classify_pair(pair: IndefinitePair, seed: int = 0) -> list[tuple[CanonicalForm, Certificate]]:
    """Split ``pair`` into indecomposable blocks and classify each.

    Every certificate ``T`` is expressed in the coordinates of ``pair`` (an
    ``n x n_i`` matrix); stacking them side by side gives a global certificate.
    """
    k = pair.signature.rank
    if k > 2:
        raise RankTooHigh(f"rank {k} exceeds two", rank=k)
    out = []
    for b in split_orthogonal(pair, seed=seed).blocks:
        out.extend(_classify_with_resplit(b.basis, b.pair, seed))
    return out


def _classify_with_resplit(basis, block, seed):
    try:
        return [_embed(basis, *classify_block(block))]
    except DecomposableDetected:
        for s in RESPLIT_SEEDS:
            dec = split_orthogonal(block, seed=seed + s, draws=24)
            if len(dec.blocks) > 1:
                res = []
                for b in dec.blocks:
                    res.extend(_classify_with_resplit(basis @ b.basis, b.pair, seed))
                return res
        raise


def global_certificate(results) -> np.ndarray:
    """Side-by-side certificates: ``T^-1 N T`` is the direct sum of the canonical blocks."""
    return np.hstack([c.T for _, c in results])


def _key(cf: CanonicalForm):
    return (cf.family.value, cf.h_sign, cf.n)


def pairs_equivalent(p1: IndefinitePair, p2: IndefinitePair, tol: float = PARAM_TOL) -> bool:
    """True when both pairs have the same canonical blocks (parameters within ``tol``)."""
    if p1.n != p2.n or p1.signature != p2.signature:
        return False
    a = [cf for cf, _ in classify_pair(p1)]
    b = [cf for cf, _ in classify_pair(p2)]
    if sorted(map(_key, a)) != sorted(map(_key, b)):
        return False
    unmatched = list(b)
    for cf in a:
        for j, other in enumerate(unmatched):
            if _key(other) == _key(cf) and param_distance(cf.params, other.params) <= tol:
                del unmatched[j]
                break
        else:
            return False
    return True

