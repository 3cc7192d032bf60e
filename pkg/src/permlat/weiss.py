"""Checkers for Weiss-type criteria and their converse.

Classical form: for ``N`` normal in ``G``, if ``M`` restricted to ``N`` is
free and ``M^N`` is a permutation ``G/N``-lattice, then ``M`` is a
permutation lattice.  Generalized form (``|N| = p``): freeness is replaced by
the existence of a G-invariant, N-trivial saturated ``W`` inside ``M^N`` with
``M/W`` free over ``N``.  The existential hypothesis is only semi-decided:
a search miss is reported as ``inconclusive``, never as a failure.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd

import flint

from . import _matrix as mx
from .decomp import (PermutationCertificate, Verdict, canonical_class_order, class_label, cp_split,
                     recognize_permutation)
from .exceptions import (CandidateInvalid, InputError, NotNormal, NotPermutationOverC,
                         PreconditionFailed, SearchInconclusive, WrongOrder)
from .lattice import (Lattice, Sublattice, _ctx, _integral_action, invariants, invariants_lattice,
                      quotient, restrict, saturated_span)
from .padic_linalg import PrecisionContext, is_saturated, saturate
from .pgroup import Subgroup, classify_subgroups

fmpz_mat = flint.fmpz_mat

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"

SEARCH_VECTOR_LIMIT = 20000
SEARCH_SUBSET_LIMIT = 500


@dataclass(frozen=True)
class HypothesisVerdict:
    status: str
    reason: str = ""
    evidence: dict = field(default_factory=dict)
    certificate: PermutationCertificate | None = None

    @property
    def holds(self) -> bool:
        return self.status == PASS


@dataclass(frozen=True)
class TrivialPartCandidate:
    """A proposed ``M_1``; ``provenance`` is 'supplied', 'canonical-search' or 'certificate'."""

    basis: Sublattice
    provenance: str = "supplied"


@dataclass(frozen=True)
class WeissReport:
    theorem: str
    hypothesis_i: HypothesisVerdict
    hypothesis_ii: HypothesisVerdict
    conclusion_check: Verdict
    consistent: bool
    forced_rank: int | None = None
    witness: TrivialPartCandidate | None = None

    @property
    def hypotheses_hold(self) -> bool:
        return self.hypothesis_i.holds and self.hypothesis_ii.holds


def _check_normal(G, N) -> Subgroup:
    N = G.as_subgroup(N)
    if not N.is_normal:
        raise NotNormal("N must be a normal subgroup")
    return N


def _nonzero_labels(cert: PermutationCertificate) -> dict:
    return {k: m for k, m in cert.multiplicities.items() if m}


def _free_label(G) -> str:
    # the trivial subgroup is always class 0 (smallest, lexicographically first)
    return class_label(0)


def _is_free_verdict(v: Verdict, group) -> bool:
    if not v.is_permutation:
        return False
    return set(_nonzero_labels(v.certificate)) <= {_free_label(group)}


def _restriction_verdict(M: Lattice, N: Subgroup, ctx, seed) -> Verdict:
    return recognize_permutation(restrict(M, N), ctx, seed=seed)


def _hypothesis_ii(M: Lattice, N: Subgroup, ctx, seed) -> HypothesisVerdict:
    L = invariants_lattice(M, N, ctx)
    v = recognize_permutation(L, ctx, seed=seed)
    ev = {"rank": L.rank}
    if v.is_permutation:
        ev["multiplicities"] = _nonzero_labels(v.certificate)
        return HypothesisVerdict(PASS, "M^N is a permutation G/N-lattice", ev, v.certificate)
    ev["witness_rank"] = v.witness.rank if v.witness is not None else None
    return HypothesisVerdict(FAIL, "M^N is not a permutation G/N-lattice", ev)


def check_weiss_classic(M: Lattice, N, ctx: PrecisionContext | None = None, seed: int = 0) -> WeissReport:
    G = M.group
    ctx = _ctx(G, ctx)
    N = _check_normal(G, N)
    R = restrict(M, N)
    v = recognize_permutation(R, ctx, seed=seed)
    ev = {"restriction_rank": R.rank}
    if v.is_permutation:
        ev["multiplicities"] = _nonzero_labels(v.certificate)
    if _is_free_verdict(v, R.group):
        h1 = HypothesisVerdict(PASS, "restriction to N is free", ev, v.certificate)
    elif v.is_permutation:
        h1 = HypothesisVerdict(FAIL, "restriction to N is permutation but not free", ev, v.certificate)
    else:
        h1 = HypothesisVerdict(FAIL, "restriction to N is not a permutation lattice", ev)
    h2 = _hypothesis_ii(M, N, ctx, seed)
    concl = recognize_permutation(M, ctx, seed=seed)
    consistent = not (h1.holds and h2.holds) or concl.is_permutation
    return WeissReport("classic", h1, h2, concl, consistent)


# --------------------------------------------------------------------------
# generalized form

def forced_trivial_rank(M: Lattice, N: Subgroup, ctx: PrecisionContext | None = None) -> int | None:
    """``(p rank M^N - rank M) / (p - 1)`` when it is a valid rank, else None."""
    ctx = _ctx(M.group, ctx)
    p = ctx.p
    rN = invariants(M, N, ctx).rank
    num = p * rN - M.rank
    if num < 0 or num % (p - 1):
        return None
    w = num // (p - 1)
    return w if w <= rN else None


def _validate_candidate(M: Lattice, N: Subgroup, B: fmpz_mat, w: int | None, p: int) -> str | None:
    """Reason the candidate is unusable, or None."""
    n = M.rank
    if B.nrows() != n:
        return "candidate basis has the wrong length"
    if B.ncols() and mx.rank_q(B) != B.ncols():
        return "candidate basis is not independent"
    if not is_saturated(B, p):
        return "candidate is not saturated"
    for g in N.elements:
        if M.action[g] * B != B:
            return "candidate is not N-trivial"
    try:
        _integral_action(B, [M.action[g] for g in M.group.generators], p)
    except InputError:
        return "candidate is not G-invariant"
    if w is not None and B.ncols() != w:
        return f"candidate rank {B.ncols()} differs from the forced rank {w}"
    return None


def _quotient_is_free(M: Lattice, N: Subgroup, B: fmpz_mat, ctx, seed) -> tuple[bool, dict]:
    q = quotient(M, B, ctx)
    ev = {"quotient_rank": q.lattice.rank, "quotient_torsion": list(q.torsion_exponents)}
    if q.torsion_exponents:
        return False, ev
    R = restrict(q.lattice, N)
    v = recognize_permutation(R, ctx, seed=seed)
    if v.is_permutation:
        ev["quotient_multiplicities"] = _nonzero_labels(v.certificate)
    return _is_free_verdict(v, R.group), ev


def _eigen_vectors(M: Lattice, BN: fmpz_mat, p: int) -> tuple[list[fmpz_mat], bool]:
    """Primitive common +-1 eigenvectors in M^N with coefficients bounded by p^2.

    Returns the vectors and whether the enumeration finished within the limit.
    """
    d = BN.ncols()
    bound = p * p
    signs = (1, -1) if p == 2 else (1,)
    gens = M.group.generators
    found = []
    seen = set()
    count = 0
    for c in itertools.product(range(-bound, bound + 1), repeat=d):
        first = next((x for x in c if x), 0)
        if first <= 0:
            continue
        g0 = 0
        for x in c:
            g0 = gcd(g0, x)
        if g0 != 1:
            continue
        count += 1
        if count > SEARCH_VECTOR_LIMIT:
            return found, False
        v = BN * fmpz_mat(d, 1, list(c))
        if all(any(M.action[g] * v == s * v for s in signs) for g in gens):
            key = tuple(int(x) for x in v.entries())
            if key not in seen:
                seen.add(key)
                found.append(v)
    return found, True


def _search_candidates(M: Lattice, N: Subgroup, w: int, ctx, seed):
    """Yield (basis, origin) candidates for W in the canonical order."""
    p = ctx.p
    n = M.rank
    if w == 0:
        yield fmpz_mat(n, 0), "zero"
        return
    try:
        split = cp_split(M, N, ctx, seed=seed)
        W = saturated_span(M, split.M1.basis, ctx)
        if W.ncols() == w:
            yield W, "span-of-trivial-part"
    except NotPermutationOverC:
        pass
    BN = invariants(M, N, ctx).basis
    vecs, complete = _eigen_vectors(M, BN, p)
    tried = 0
    for combo in itertools.combinations(range(len(vecs)), w):
        tried += 1
        if tried > SEARCH_SUBSET_LIMIT:
            break
        S = mx.hstack([vecs[i] for i in combo], n)
        if mx.rank_q(S) != w:
            continue
        yield saturate(S, n, ctx), "eigen-span"


def check_weiss_generalized(M: Lattice, N, candidate: TrivialPartCandidate | Sublattice | None = None,
                            ctx: PrecisionContext | None = None, seed: int = 0,
                            raise_inconclusive: bool = False) -> WeissReport:
    """Check both hypotheses of the order-p criterion and cross-check the conclusion.

    A supplied ``candidate`` is validated (CandidateInvalid on failure) and
    used as the only witness; otherwise a bounded search is run.
    """
    G = M.group
    ctx = _ctx(G, ctx)
    N = _check_normal(G, N)
    p = ctx.p
    if N.order != p:
        raise WrongOrder(f"N must have order {p}; use the classical checker for larger N")
    w = forced_trivial_rank(M, N, ctx)
    witness = None
    if isinstance(candidate, Sublattice):
        candidate = TrivialPartCandidate(candidate, "supplied")
    if candidate is not None:
        reason = _validate_candidate(M, N, candidate.basis.basis, w, p)
        if reason is not None:
            raise CandidateInvalid(reason)
    ev: dict = {"forced_rank": w}
    if w is None:
        h1 = HypothesisVerdict(FAIL, "no admissible rank for W", ev)
    else:
        rv = _restriction_verdict(M, N, ctx, seed)
        if rv.is_permutation:
            ev["restriction_multiplicities"] = _nonzero_labels(rv.certificate)
        if not rv.is_permutation:
            h1 = HypothesisVerdict(FAIL, "restriction to N is not a permutation lattice", ev)
        elif candidate is not None:
            ok, qev = _quotient_is_free(M, N, candidate.basis.basis, ctx, seed)
            ev.update(qev)
            ev["candidate_rank"] = candidate.basis.rank
            if ok:
                witness = candidate
                h1 = HypothesisVerdict(PASS, "supplied W is valid and M/W is N-free", ev)
            else:
                h1 = HypothesisVerdict(INCONCLUSIVE, "supplied W has an N-non-free quotient", ev)
        else:
            tried = []
            for B, origin in _search_candidates(M, N, w, ctx, seed):
                if _validate_candidate(M, N, B, w, p) is not None:
                    continue
                ok, qev = _quotient_is_free(M, N, B, ctx, seed)
                tried.append({"origin": origin, "basis": mx.columns(B), "quotient_free": ok})
                if ok:
                    witness = TrivialPartCandidate(Sublattice(M, B, True, True), "canonical-search")
                    break
            ev["candidates"] = tried
            if witness is not None:
                h1 = HypothesisVerdict(PASS, "search found W with N-free quotient", ev)
            else:
                h1 = HypothesisVerdict(INCONCLUSIVE, "bounded search found no valid W", ev)
    h2 = _hypothesis_ii(M, N, ctx, seed)
    concl = recognize_permutation(M, ctx, seed=seed)
    consistent = True
    if h1.holds and h2.holds:
        consistent = concl.is_permutation and _trivial_part_rank(concl.certificate, N) == w
    report = WeissReport("generalized", h1, h2, concl, consistent, w, witness)
    if raise_inconclusive and h1.status == INCONCLUSIVE:
        raise SearchInconclusive(h1.reason, report)
    return report


def _trivial_part_rank(cert: PermutationCertificate, N: Subgroup) -> int:
    """Rank of the blocks ``Z[G/K]`` with ``N <= K``."""
    G = cert.group
    reps = classify_subgroups(G).class_reps
    total = 0
    for lab, m in cert.multiplicities.items():
        K = reps[int(lab[1:])]
        if m and all(x in K for x in N.elements):
            total += m * (G.order // K.order)
    return total


def trivial_part_from_certificate(M: Lattice, cert: PermutationCertificate, N: Subgroup) -> fmpz_mat:
    """Columns of the certificate belonging to blocks ``Z[G/K]`` with ``N <= K``."""
    G = M.group
    reps = classify_subgroups(G).class_reps
    cols = []
    pos = 0
    for k in cert.blocks():
        size = G.order // reps[k].order
        if all(x in reps[k] for x in N.elements):
            cols.extend(range(pos, pos + size))
        pos += size
    return mx.select_columns(cert.change_of_basis, cols)


@dataclass(frozen=True)
class NecessityReport:
    passed: bool
    hypothesis_i: HypothesisVerdict
    hypothesis_ii: HypothesisVerdict
    trivial_part_rank: int


def necessity_check(M: Lattice, N, ctx: PrecisionContext | None = None, seed: int = 0,
                    verdict: Verdict | None = None) -> NecessityReport:
    """For a permutation lattice, both hypotheses must hold with W read off the certificate."""
    G = M.group
    ctx = _ctx(G, ctx)
    N = _check_normal(G, N)
    if N.order != ctx.p:
        raise WrongOrder(f"N must have order {ctx.p}")
    v = verdict if verdict is not None else recognize_permutation(M, ctx, seed=seed)
    if not v.is_permutation:
        raise PreconditionFailed("necessity needs a permutation lattice")
    B = trivial_part_from_certificate(M, v.certificate, N)
    # certificate columns are p-local basis vectors; saturate to a clean basis
    W = saturate(B, M.rank, ctx) if B.ncols() else B
    reason = _validate_candidate(M, N, W, forced_trivial_rank(M, N, ctx), ctx.p)
    ev = {"trivial_part_rank": W.ncols()}
    if reason is not None:
        h1 = HypothesisVerdict(FAIL, reason, ev)
    else:
        ok, qev = _quotient_is_free(M, N, W, ctx, seed)
        ev.update(qev)
        h1 = HypothesisVerdict(PASS if ok else FAIL,
                               "M/W is N-free" if ok else "M/W is not N-free", ev)
    h2 = _hypothesis_ii(M, N, ctx, seed)
    return NecessityReport(h1.holds and h2.holds, h1, h2, W.ncols())
