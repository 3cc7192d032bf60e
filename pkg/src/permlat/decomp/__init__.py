"""Krull-Schmidt decomposition and permutation-lattice recognition."""
from .endring import (EndRing, RadicalData, endomorphism_ring, lift_idempotent,
                      radical_and_simples_mod_p)
from .recognition import (METHODS, CpSplit, PermutationCertificate, Verdict, IsPermutation, NotPermutation,
                          brauer_multiplicities, canonical_class_order, class_label, cp_split,
                          recognize_permutation, table_of_marks, verify_certificate)
from .splitting import (Decomposition, IsoResult, is_indecomposable, iso_indecomposable,
                        krull_schmidt, split_by_idempotent)

__all__ = [
    "EndRing", "RadicalData", "endomorphism_ring", "lift_idempotent", "radical_and_simples_mod_p",
    "METHODS", "CpSplit", "PermutationCertificate", "Verdict", "IsPermutation", "NotPermutation",
    "brauer_multiplicities", "canonical_class_order", "class_label", "cp_split",
    "recognize_permutation", "table_of_marks", "verify_certificate",
    "Decomposition", "IsoResult", "is_indecomposable", "iso_indecomposable", "krull_schmidt",
    "split_by_idempotent",
]
