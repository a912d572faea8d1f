"""Reduction of H-normal pairs to canonical form, with certificates."""

from .driver import classify_block, classify_pair, global_certificate, pairs_equivalent
from .forms import CanonicalForm, Certificate, certify
from .reducers import reduce_dim1_dec, reduce_dim1_indec, reduce_dim2, reduce_two_eigenvalues

__all__ = [
    "CanonicalForm",
    "Certificate",
    "certify",
    "classify_block",
    "classify_pair",
    "global_certificate",
    "pairs_equivalent",
    "reduce_dim1_dec",
    "reduce_dim1_indec",
    "reduce_dim2",
    "reduce_two_eigenvalues",
]
