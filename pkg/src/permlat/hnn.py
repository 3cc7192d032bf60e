"""Special HNN-extensions of a finite p-group and their abelianized kernels.

A presentation is ``H * F(letters)`` modulo ``[a, x]`` for ``x`` a letter of
edge ``e`` and ``a`` in a generating set of ``H_e``.  The kernel of the map
killing all letters has transversal ``H``; its abelianization is computed by
Reidemeister-Schreier on integer relation matrices, independently of the
recognizer that produced the certificate.
"""
from __future__ import annotations

from dataclasses import dataclass

import flint

from . import _matrix as mx
from .decomp import PermutationCertificate, canonical_class_order, class_label, recognize_permutation
from .exceptions import InputError, InternalInconsistency
from .lattice import Lattice, _ctx, direct_sum, quotient, regular_lattice, zero_lattice
from .padic_linalg import PrecisionContext
from .pgroup import PGroup, Subgroup, classify_subgroups

fmpz_mat = flint.fmpz_mat


@dataclass(frozen=True)
class HnnEdge:
    subgroup: Subgroup
    multiplicity: int
    label: str

    @property
    def letters(self) -> tuple[str, ...]:
        return tuple(f"x_{self.label}_{j}" for j in range(self.multiplicity))


@dataclass(frozen=True)
class HnnPresentation:
    """Base group plus edges ``(H_e, m_e)`` over pairwise non-conjugate class representatives."""

    base: PGroup
    edges: tuple

    @property
    def letter_names(self) -> tuple[str, ...]:
        return tuple(nm for e in self.edges for nm in e.letters)

    def relators(self) -> list[tuple[int, str]]:
        """Pairs ``(a, x)`` standing for the commutator ``[a, x]``."""
        out = []
        for e in self.edges:
            gens = self.base.subgroup_generators(e.subgroup)
            for x in e.letters:
                out.extend((a, x) for a in gens)
        return out


@dataclass(frozen=True)
class FreeProductPresentation:
    finite_factor: PGroup
    free_rank: int


def make_presentation(H: PGroup, edges) -> HnnPresentation:
    """Build a presentation from ``(subgroup, multiplicity)`` pairs.

    Each subgroup is replaced by its conjugacy-class representative; two
    edges in the same class are rejected.
    """
    cls = classify_subgroups(H)
    by_class = {}
    for K, m in edges:
        K = H.as_subgroup(K)
        m = int(m)
        if m < 1:
            raise InputError("edge multiplicities must be positive")
        k = cls.rep_index(K)
        if k in by_class:
            raise InputError("edge subgroups must be pairwise non-conjugate")
        by_class[k] = m
    order = canonical_class_order(H)
    out = tuple(HnnEdge(cls.class_reps[k], by_class[k], class_label(k)) for k in order if k in by_class)
    return HnnPresentation(H, out)


def synthesize_hnn(cert: PermutationCertificate, H: PGroup) -> HnnPresentation:
    """One edge per nonzero multiplicity of the certificate, in canonical order."""
    if cert.group is not H:
        raise InputError("certificate is over a different group")
    reps = classify_subgroups(H).class_reps
    edges = tuple(HnnEdge(reps[int(lab[1:])], m, lab) for lab, m in cert.multiplicities.items() if m)
    return HnnPresentation(H, edges)


def kernel_rank(pres: HnnPresentation) -> int:
    H = pres.base
    return sum(e.multiplicity * (H.order // e.subgroup.order) for e in pres.edges)


def _letter_relations(H: PGroup, K: Subgroup) -> fmpz_mat:
    """Columns ``y_{t a} - y_t`` for t in H and a generating K."""
    cols = []
    for a in H.subgroup_generators(K):
        for t in range(H.order):
            c = [0] * H.order
            c[H.mul[t][a]] += 1
            c[t] -= 1
            cols.append(c)
    return mx.from_columns(cols, H.order)


def kernel_abelianization(pres: HnnPresentation, ctx: PrecisionContext | None = None) -> Lattice:
    """The kernel's abelianization with H acting by conjugation (left translation)."""
    H = pres.base
    ctx = _ctx(H, ctx)
    free = regular_lattice(H)
    parts = []
    for e in pres.edges:
        rel = _letter_relations(H, e.subgroup)
        if rel.ncols():
            snf = rel.snf()
            divisors = [abs(int(snf[i, i])) for i in range(min(snf.nrows(), snf.ncols()))]
            if any(d > 1 for d in divisors):
                raise InternalInconsistency("abelianized kernel has torsion")
        q = quotient(free, rel, ctx)
        if q.torsion_exponents:
            raise InternalInconsistency("abelianized kernel has p-torsion")
        parts.extend([q.lattice] * e.multiplicity)
    if not parts:
        return zero_lattice(H)
    L = direct_sum(parts)
    if L.rank != kernel_rank(pres):
        raise InternalInconsistency("kernel rank disagrees with the coset count")
    return L


@dataclass(frozen=True)
class RoundtripResult:
    ok: bool
    expected: dict
    recovered: dict | None
    kernel_rank: int

    def __bool__(self):
        return self.ok


def roundtrip_check(cert: PermutationCertificate, H: PGroup, ctx: PrecisionContext | None = None,
                    seed: int = 0) -> RoundtripResult:
    pres = synthesize_hnn(cert, H)
    L = kernel_abelianization(pres, ctx)
    v = recognize_permutation(L, ctx, seed=seed)
    got = dict(v.certificate.multiplicities) if v.is_permutation else None
    ok = got == dict(cert.multiplicities) and L.rank == kernel_rank(pres)
    return RoundtripResult(ok, dict(cert.multiplicities), got, L.rank)


def quotient_kill_nontrivial_edges(pres: HnnPresentation) -> FreeProductPresentation:
    return FreeProductPresentation(pres.base, sum(e.multiplicity for e in pres.edges if e.subgroup.order == 1))
