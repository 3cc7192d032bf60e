"""Exact computations with integral p-adic lattices over finite p-groups.

The functional core lives in the submodules; ``permlat.estimators`` wraps it
in scikit-learn style objects.
"""
from .decomp import (CpSplit, Decomposition, PermutationCertificate, Verdict, cp_split, is_indecomposable,
                     iso_indecomposable, krull_schmidt, recognize_permutation, verify_certificate)
from .exceptions import (CandidateInvalid, InputError, InternalInconsistency, NotPermutationOverC,
                         PermlatError, PrecisionExhausted, PreconditionFailed, SearchInconclusive)
from .hnn import (HnnPresentation, kernel_abelianization, kernel_rank, make_presentation,
                  quotient_kill_nontrivial_edges, roundtrip_check, synthesize_hnn)
from .lattice import (Lattice, Sublattice, direct_sum, induce, invariants, invariants_lattice,
                      permutation_lattice, regular_lattice, restrict, scramble, sign_lattice, trivial_lattice)
from .padic_linalg import PrecisionContext
from .pgroup import PGroup, Subgroup, bundled_group, bundled_group_names, classify_subgroups, from_permutations
from .weiss import check_weiss_classic, check_weiss_generalized, necessity_check

__version__ = "0.1.0"

__all__ = [
    "CpSplit", "Decomposition", "PermutationCertificate", "Verdict", "cp_split", "is_indecomposable",
    "iso_indecomposable", "krull_schmidt", "recognize_permutation", "verify_certificate",
    "CandidateInvalid", "InputError", "InternalInconsistency", "NotPermutationOverC", "PermlatError",
    "PrecisionExhausted", "PreconditionFailed", "SearchInconclusive",
    "HnnPresentation", "kernel_abelianization", "kernel_rank", "make_presentation",
    "quotient_kill_nontrivial_edges", "roundtrip_check", "synthesize_hnn",
    "Lattice", "Sublattice", "direct_sum", "induce", "invariants", "invariants_lattice",
    "permutation_lattice", "regular_lattice", "restrict", "scramble", "sign_lattice", "trivial_lattice",
    "PrecisionContext", "PGroup", "Subgroup", "bundled_group", "bundled_group_names", "classify_subgroups",
    "from_permutations", "check_weiss_classic", "check_weiss_generalized", "necessity_check",
    "__version__",
]
