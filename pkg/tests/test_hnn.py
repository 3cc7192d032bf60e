import pytest
from hypothesis import given, settings, strategies as st

from permlat import _matrix as mx
from permlat.decomp import (PermutationCertificate, canonical_class_order, class_label, iso_indecomposable,
                            recognize_permutation, verify_certificate)
from permlat.exceptions import InputError
from permlat.fixtures import c2_mixed, permutation_module
from permlat.hnn import (kernel_abelianization, kernel_rank, make_presentation, quotient_kill_nontrivial_edges,
                         roundtrip_check, synthesize_hnn)
from permlat.lattice import permutation_lattice, regular_lattice
from permlat.pgroup import bundled_group, bundled_group_names, classify_subgroups

V = bundled_group("c2xc2")
C1 = V.generated_subgroup([V.generators[0]])


def identity_certificate(G, m):
    labels = {class_label(k): m[k] for k in canonical_class_order(G)}
    return PermutationCertificate(G, labels, mx.identity(permutation_module(G, m).rank))


def test_synthesize_examples():
    C2 = bundled_group("c2")
    v = recognize_permutation(c2_mixed())
    pres = synthesize_hnn(v.certificate, C2)
    assert {(e.subgroup.order, e.multiplicity) for e in pres.edges} == {(2, 1), (1, 2)}
    assert kernel_rank(pres) == 5
    assert len(pres.letter_names) == 3
    # one commutator per letter of the nontrivial edge, none for the free letters
    assert len(pres.relators()) == 1


def test_synthesize_rejects_foreign_certificate():
    cert = identity_certificate(bundled_group("c2"), [1, 0])
    with pytest.raises(InputError):
        synthesize_hnn(cert, bundled_group("c4"))


def test_kernel_abelianization_examples():
    # trivial subgroup edge, no edges, and the whole-group edge
    pres = make_presentation(V, [(V.whole(), 1)])
    L = kernel_abelianization(pres)
    assert L.rank == 1 and all(a == mx.identity(1) for a in L.action)
    assert kernel_abelianization(make_presentation(V, [])).rank == 0
    L = kernel_abelianization(make_presentation(V, [(V.trivial_subgroup(), 2)]))
    assert L.rank == 8
    assert recognize_permutation(L).certificate.nonzero() == {"K0": 2}
    L = kernel_abelianization(make_presentation(V, [(C1, 1)]))
    assert L.rank == 2
    assert iso_indecomposable(L, permutation_lattice(V, C1)).isomorphic


def test_roundtrip_c4_order_two():
    C4 = bundled_group("c4")
    cls = classify_subgroups(C4)
    k = next(i for i, K in enumerate(cls.class_reps) if K.order == 2)
    m = [0] * len(cls.class_reps)
    m[k] = 1
    r = roundtrip_check(identity_certificate(C4, m), C4)
    assert r.ok and r.kernel_rank == 2 and r.recovered == r.expected


def test_quotient_kill_nontrivial_edges():
    pres = make_presentation(V, [(V.trivial_subgroup(), 3), (C1, 2), (V.whole(), 1)])
    fp = quotient_kill_nontrivial_edges(pres)
    assert fp.finite_factor is V and fp.free_rank == 3
    assert quotient_kill_nontrivial_edges(make_presentation(V, [(C1, 1)])).free_rank == 0


def test_make_presentation_normalizes_and_rejects():
    D4 = bundled_group("d4")
    cls = classify_subgroups(D4)
    K = next(K for K in cls.all_subgroups if not K.is_normal)
    pres = make_presentation(D4, [(K, 1)])
    assert pres.edges[0].subgroup == cls.class_reps[cls.rep_index(K)]
    twin = next(L for L in cls.all_subgroups if L != K and cls.rep_index(L) == cls.rep_index(K))
    with pytest.raises(InputError):
        make_presentation(D4, [(K, 1), (twin, 1)])
    with pytest.raises(InputError):
        make_presentation(D4, [(K, 0)])


def test_bookkeeping_identity():
    for name in bundled_group_names():
        G = bundled_group(name)
        reps = classify_subgroups(G).class_reps
        m = [1] * len(reps)
        pres = synthesize_hnn(identity_certificate(G, m), G)
        assert kernel_rank(pres) == sum(G.order // K.order for K in reps)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["c2", "c4", "c2xc2", "d4", "q8", "c3xc3"]),
       st.lists(st.integers(0, 2), min_size=1, max_size=10))
def test_roundtrip_property(name, draws):
    G = bundled_group(name)
    n = len(classify_subgroups(G).class_reps)
    m = (draws * n)[:n]
    if not any(m) or permutation_module(G, m).rank > 32:
        return
    cert = identity_certificate(G, m)
    assert verify_certificate(permutation_module(G, m), cert)
    r = roundtrip_check(cert, G)
    assert r.ok and r.kernel_rank == permutation_module(G, m).rank
    L = kernel_abelianization(synthesize_hnn(cert, G))
    assert L.rank == regular_lattice(G).rank * m[0] + sum(
        v * (G.order // K.order) for v, K in zip(m[1:], classify_subgroups(G).class_reps[1:]))
