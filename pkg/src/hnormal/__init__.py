"""H-normal operators on indefinite scalar-product spaces of rank at most two.

Classify a pair ``(N, H)`` into indecomposable canonical blocks, read off the
complete invariants of each block, and certify the reduction with an explicit
H-unitary transformation.
"""

from .classify import CanonicalForm, Certificate, classify_block, classify_pair, global_certificate, pairs_equivalent
from .congr2 import CongruenceForm2, CongruenceKind, congruence_canonical_2x2, f_rho, solve_rho
from .decomp import block_size_law_holds, split_orthogonal, split_S0_S_S1
from .errors import HNormalError
from .families import FamilyTag, InvariantRecord, template
from .genfuzz import SampleSpec, random_h_unitary, roundtrip_oracle, sample_canonical
from .matcore import IndefinitePair, conjugate_pair, h_adjoint, is_h_normal, is_h_unitary, signature

__version__ = "0.1.0"

__all__ = [
    "CanonicalForm",
    "Certificate",
    "CongruenceForm2",
    "CongruenceKind",
    "FamilyTag",
    "HNormalError",
    "IndefinitePair",
    "InvariantRecord",
    "SampleSpec",
    "block_size_law_holds",
    "classify_block",
    "classify_pair",
    "congruence_canonical_2x2",
    "conjugate_pair",
    "f_rho",
    "global_certificate",
    "h_adjoint",
    "is_h_normal",
    "is_h_unitary",
    "pairs_equivalent",
    "random_h_unitary",
    "roundtrip_oracle",
    "sample_canonical",
    "signature",
    "solve_rho",
    "split_S0_S_S1",
    "split_orthogonal",
    "template",
]
