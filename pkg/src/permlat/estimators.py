"""scikit-learn style estimators over the functional core.

Constructor arguments are stored verbatim; everything computed lives in
trailing-underscore attributes set by ``fit``.  ``get_params`` and
``set_params`` come from BaseEstimator.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .decomp import METHODS, cp_split, krull_schmidt, recognize_permutation, verify_certificate
from .exceptions import InputError
from .hnn import kernel_abelianization, kernel_rank, quotient_kill_nontrivial_edges, roundtrip_check, synthesize_hnn
from .lattice import Lattice
from .validation import check_context, check_lattice, check_seed, parse_subgroup
from .weiss import check_weiss_classic, check_weiss_generalized, necessity_check


class PermutationRecognizer(BaseEstimator, TransformerMixin):
    """Decide whether a lattice is a permutation lattice.

    ``transform`` returns the lattice rewritten on the certificate basis,
    where every group element acts by a permutation matrix.
    """

    def __init__(self, p=None, cap=64, seed=0, method="auto"):
        self.p = p
        self.cap = cap
        self.seed = seed
        self.method = method

    def _recognize(self, M: Lattice):
        M = check_lattice(M)
        if self.method not in METHODS:
            raise InputError(f"method must be one of {METHODS}")
        ctx = check_context(M.group, self.p, self.cap)
        return recognize_permutation(M, ctx, seed=check_seed(self.seed), method=self.method)

    def fit(self, X, y=None):
        v = self._recognize(X)
        self.verdict_ = v
        self.is_permutation_ = v.is_permutation
        self.certificate_ = v.certificate
        self.multiplicities_ = v.certificate.nonzero() if v.is_permutation else None
        self.witness_ = v.witness
        return self

    def transform(self, X):
        """``X`` in certificate coordinates: the block permutation lattice.

        The change of basis is only unimodular over the p-local integers, so the
        result is the verified block form rather than an integral conjugate.
        """
        check_is_fitted(self, "verdict_")
        if not self.is_permutation_:
            raise InputError("lattice is not a permutation lattice; nothing to transform")
        if not verify_certificate(X, self.certificate_):
            raise InputError("fitted certificate does not apply to this lattice")
        return self.certificate_.block_lattice()

    def predict(self, X):
        """One boolean per lattice in ``X``."""
        return np.array([self._recognize(M).is_permutation for M in X], dtype=bool)


class KrullSchmidtDecomposer(BaseEstimator):
    def __init__(self, p=None, cap=64, seed=0):
        self.p = p
        self.cap = cap
        self.seed = seed

    def fit(self, X, y=None):
        M = check_lattice(X)
        ctx = check_context(M.group, self.p, self.cap)
        self.decomposition_ = krull_schmidt(M, ctx, seed=check_seed(self.seed))
        self.summands_ = self.decomposition_.summands
        self.summand_ranks_ = self.decomposition_.ranks
        return self


class WeissChecker(BaseEstimator):
    """Run one of the Weiss-type checks against a normal subgroup.

    ``variant`` is ``classic``, ``generalized`` or ``necessity``; ``subgroup``
    accepts anything ``parse_subgroup`` does.
    """

    def __init__(self, subgroup="center", variant="generalized", candidate=None, p=None, cap=64, seed=0,
                 raise_inconclusive=False):
        self.subgroup = subgroup
        self.variant = variant
        self.candidate = candidate
        self.p = p
        self.cap = cap
        self.seed = seed
        self.raise_inconclusive = raise_inconclusive

    def fit(self, X, y=None):
        M = check_lattice(X)
        ctx = check_context(M.group, self.p, self.cap)
        seed = check_seed(self.seed)
        N = parse_subgroup(M.group, self.subgroup)
        if self.variant == "classic":
            r = check_weiss_classic(M, N, ctx, seed)
        elif self.variant == "generalized":
            r = check_weiss_generalized(M, N, self.candidate, ctx, seed, self.raise_inconclusive)
        elif self.variant == "necessity":
            r = necessity_check(M, N, ctx, seed)
        else:
            raise InputError("variant must be classic, generalized or necessity")
        self.report_ = r
        self.subgroup_ = N
        return self

    def predict(self, X=None):
        """Whether the hypotheses (or, for necessity, the necessary conditions) hold."""
        check_is_fitted(self, "report_")
        r = self.report_
        return bool(r.passed) if self.variant == "necessity" else bool(r.hypotheses_hold)


class CpSplitter(BaseEstimator, TransformerMixin):
    def __init__(self, subgroup=None, p=None, cap=64, seed=0):
        self.subgroup = subgroup
        self.p = p
        self.cap = cap
        self.seed = seed

    def fit(self, X, y=None):
        M = check_lattice(X)
        ctx = check_context(M.group, self.p, self.cap)
        C = parse_subgroup(M.group, self.subgroup if self.subgroup is not None else "center")
        self.split_ = cp_split(M, C, ctx, seed=check_seed(self.seed))
        return self

    def transform(self, X):
        check_is_fitted(self, "split_")
        return self.split_.M1, self.split_.Mp


class HnnSynthesizer(BaseEstimator):
    """Certificate of a permutation lattice to a special HNN presentation."""

    def __init__(self, p=None, cap=64, seed=0, verify=True):
        self.p = p
        self.cap = cap
        self.seed = seed
        self.verify = verify

    def fit(self, X, y=None):
        M = check_lattice(X)
        ctx = check_context(M.group, self.p, self.cap)
        seed = check_seed(self.seed)
        v = recognize_permutation(M, ctx, seed=seed)
        if not v.is_permutation:
            raise InputError("lattice is not a permutation lattice; no HNN presentation exists")
        self.certificate_ = v.certificate
        self.presentation_ = synthesize_hnn(v.certificate, M.group)
        self.kernel_rank_ = kernel_rank(self.presentation_)
        self.free_product_ = quotient_kill_nontrivial_edges(self.presentation_)
        self.roundtrip_ = roundtrip_check(v.certificate, M.group, ctx, seed) if self.verify else None
        return self

    def transform(self, X=None):
        """The abelianized kernel of the synthesized extension."""
        check_is_fitted(self, "presentation_")
        return kernel_abelianization(self.presentation_, check_context(self.presentation_.base, self.p, self.cap))
