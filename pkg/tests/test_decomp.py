import flint
import pytest
from hypothesis import given, settings, strategies as st

from permlat import _matrix as mx
from permlat.decomp import (PermutationCertificate, cp_split, endomorphism_ring, is_indecomposable,
                            iso_indecomposable, krull_schmidt, lift_idempotent, radical_and_simples_mod_p,
                            recognize_permutation, split_by_idempotent, table_of_marks, verify_certificate)
from permlat.exceptions import (NotIdempotentModP, NotIndecomposable, NotPermutationOverC, SearchInconclusive,
                               WrongOrder)
from permlat.fixtures import paper_example, permutation_module, random_permutation_construction
from permlat.lattice import (conjugate, direct_sum, invariants, permutation_lattice, regular_lattice, restrict,
                             scramble, sign_lattice, trivial_lattice)
from permlat.padic_linalg import PrecisionContext
from permlat.pgroup import bundled_group, bundled_group_names, classify_subgroups, orbit_count_on_cosets

import oracles

C2 = bundled_group("c2")


def mixed_c2():
    return direct_sum(trivial_lattice(C2), regular_lattice(C2))


def test_endomorphism_ring_examples():
    assert endomorphism_ring(trivial_lattice(C2)).dim == 1
    E = endomorphism_ring(regular_lattice(C2))
    assert E.dim == 2
    R = regular_lattice(C2)
    # oracle: rational dimension of the commutant
    assert E.dim == oracles.hom_rank([mx.to_lists(R.action[1])], [mx.to_lists(R.action[1])])
    M = paper_example()
    d = endomorphism_ring(M).dim
    for seed in (1, 2, 3):
        assert endomorphism_ring(scramble(M, seed)[0]).dim == d


def test_end_ring_closed_and_unital():
    E = endomorphism_ring(mixed_c2())
    n = E.module.rank
    assert any(E.element(c) == mx.identity(n) for c in [E.identity_coords])
    for a in E.basis:
        for b in E.basis:
            ab = a * b
            assert all(ab * E.module.action[g] == E.module.action[g] * ab for g in C2.generators)


def test_radical_examples():
    r = radical_and_simples_mod_p(endomorphism_ring(trivial_lattice(C2)), PrecisionContext(2))
    assert len(r.radical) == 0 and len(r.idempotents) == 1
    r = radical_and_simples_mod_p(endomorphism_ring(regular_lattice(C2)), PrecisionContext(2))
    assert len(r.radical) == 1 and len(r.idempotents) == 1 and r.is_local
    # the radical is spanned by sigma - 1 modulo 2 and is nilpotent
    x = r.radical[0]
    assert mx.is_zero_mod(x * x, 2)
    r = radical_and_simples_mod_p(endomorphism_ring(mixed_c2()), PrecisionContext(2))
    assert len(r.idempotents) == 2


def test_lift_idempotent_examples():
    M = mixed_c2()
    E = endomorphism_ring(M)
    ctx = PrecisionContext(2)
    assert lift_idempotent(mx.identity(3), E, ctx) == mx.identity(3)
    assert lift_idempotent(mx.zeros(3, 3), E, ctx).is_zero()
    S, P = scramble(M, 7)
    ES = endomorphism_ring(S)
    Pinv = mx.fmpq_to_fmpz(flint.fmpq_mat(P).inv())
    proj = flint.fmpz_mat([[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    e0 = mx.reduce_mod(Pinv * proj * P, 2)
    e = lift_idempotent(e0, ES, ctx)
    assert mx.is_zero_mod(e * e - e, 2 ** 64)
    assert mx.is_zero_mod(e - e0, 2)
    with pytest.raises(NotIdempotentModP):
        lift_idempotent(flint.fmpz_mat([[1, 1, 0], [0, 0, 0], [0, 0, 0]]) + mx.identity(3), ES, ctx)


def test_split_by_idempotent_examples():
    M = mixed_c2()
    proj = flint.fmpz_mat([[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    A, B = split_by_idempotent(M, proj)
    assert (A.rank, B.rank) == (1, 2)
    A, B = split_by_idempotent(M, mx.identity(3))
    assert (A.rank, B.rank) == (3, 0)
    S, P = scramble(M, 11)
    Pinv = mx.fmpq_to_fmpz(flint.fmpq_mat(P).inv())
    A, B = split_by_idempotent(S, mx.reduce_mod(Pinv * proj * P, 2))
    assert sorted((A.rank, B.rank)) == [1, 2]
    total = mx.hstack([A.basis, B.basis], 3)
    assert mx.det_unit_mod(total, 2)


def test_krull_schmidt_examples():
    assert krull_schmidt(regular_lattice(C2)).ranks == (2,)
    M = direct_sum(trivial_lattice(C2), trivial_lattice(C2), regular_lattice(C2))
    assert sorted(krull_schmidt(M).ranks) == [1, 1, 2]
    P = paper_example()
    base = sorted(krull_schmidt(P).ranks)
    for seed in (3, 4):
        assert sorted(krull_schmidt(scramble(P, seed)[0]).ranks) == base


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(["c2", "c4", "c2xc2", "d4", "q8", "c3xc3"]), st.integers(0, 10_000))
def test_krull_schmidt_direct_and_invariant(name, seed):
    G = bundled_group(name)
    c = random_permutation_construction(G, seed, max_rank=16)
    d = krull_schmidt(c.lattice, seed=seed)
    B = d.basis_matrix()
    assert B.ncols() == c.lattice.rank and mx.det_unit_mod(B, G.p)
    reps = classify_subgroups(G).class_reps
    want = sorted(G.order // reps[k].order for k, m in enumerate(c.multiplicities) for _ in range(m))
    assert sorted(d.ranks) == want


def test_iso_indecomposable_examples():
    R = regular_lattice(C2)
    r = iso_indecomposable(R, R)
    assert r.isomorphic and mx.det_unit_mod(r.map, 2)
    assert not iso_indecomposable(trivial_lattice(C2), sign_lattice(C2)).isomorphic
    S, _ = scramble(R, 5)
    r = iso_indecomposable(R, S)
    assert r.isomorphic
    assert all(r.map * R.action[g] == S.action[g] * r.map for g in range(2))
    with pytest.raises(NotIndecomposable):
        iso_indecomposable(mixed_c2(), mixed_c2())


def test_indecomposable_flags():
    assert is_indecomposable(paper_example())
    assert not is_indecomposable(mixed_c2())


def test_recognize_examples():
    v = recognize_permutation(paper_example())
    assert not v.is_permutation and v.witness is not None and v.witness.rank == 3
    for name in ("d4", "q8", "heisenberg3"):
        G = bundled_group(name)
        v = recognize_permutation(regular_lattice(G))
        assert v.certificate.nonzero() == {"K0": 1}
        assert verify_certificate(regular_lattice(G), v.certificate)


@pytest.mark.parametrize("method", ["brauer", "krull-schmidt", "auto"])
def test_recognize_methods_agree(method):
    G = bundled_group("d4")
    c = random_permutation_construction(G, 5, max_rank=20)
    v = recognize_permutation(c.lattice, method=method)
    assert v.is_permutation and verify_certificate(c.lattice, v.certificate)
    assert [v.certificate.multiplicities[f"K{k}"] for k in range(len(c.multiplicities))] == c.multiplicities


def test_brauer_route_declines_without_verdict():
    with pytest.raises(SearchInconclusive):
        recognize_permutation(paper_example(), method="brauer")


def test_krull_schmidt_route_on_sign_witness():
    v = recognize_permutation(sign_lattice(C2), method="krull-schmidt")
    assert not v.is_permutation and v.witness.rank == 1


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(bundled_group_names()), st.integers(0, 10_000))
def test_certificate_properties(name, seed):
    G = bundled_group(name)
    c = random_permutation_construction(G, seed, max_rank=24)
    v = recognize_permutation(c.lattice, seed=seed)
    cert = v.certificate
    assert verify_certificate(c.lattice, cert)
    reps = classify_subgroups(G).class_reps
    # rank bookkeeping
    assert sum(m * (G.order // reps[int(l[1:])].order) for l, m in cert.multiplicities.items()) == c.lattice.rank
    # conjugating by the certificate gives exact block permutation matrices
    Pinv = mx.fmpq_to_fmpz(flint.fmpq_mat(cert.change_of_basis).inv())
    if Pinv is not None:
        C = conjugate(c.lattice, cert.change_of_basis, Pinv)
        assert C.action == cert.block_lattice().action
    # fixed-point ranks agree with orbit counts
    for K in reps:
        want = sum(m * orbit_count_on_cosets(G, K, reps[int(l[1:])]) for l, m in cert.multiplicities.items())
        assert invariants(c.lattice, K).rank == want


def test_table_of_marks_c2xc2():
    marks = table_of_marks(bundled_group("c2xc2"))
    assert len(marks) == 5
    assert sorted(row[0] for row in marks)[-1] == 4


def test_cp_split_examples():
    M = paper_example()
    G = M.group
    c1 = G.generated_subgroup([G.generators[0]])
    s = cp_split(M, c1)
    assert (s.M1.rank, s.Mp.rank) == (1, 2)
    assert mx.det_unit_mod(mx.hstack([s.M1.basis, s.Mp.basis], 3), 2)
    for g in c1.elements:
        assert M.action[g] * s.M1.basis == s.M1.basis
    T = trivial_lattice(C2, 2)
    s = cp_split(T, C2.whole())
    assert (s.M1.rank, s.Mp.rank) == (2, 0)
    with pytest.raises(NotPermutationOverC):
        cp_split(sign_lattice(C2), C2.whole())
    with pytest.raises(WrongOrder):
        cp_split(regular_lattice(bundled_group("c4")), bundled_group("c4").whole())


def test_paper_example_not_permutation_over_second_factor():
    M = paper_example()
    G = M.group
    c2 = G.generated_subgroup([G.generators[1]])
    with pytest.raises(NotPermutationOverC):
        cp_split(M, c2)


def test_manual_certificate_rejects_wrong_basis():
    G = bundled_group("c4")
    M = permutation_module(G, [1, 0, 0])
    good = PermutationCertificate(G, {"K2": 0, "K1": 0, "K0": 1}, mx.identity(4))
    assert verify_certificate(M, good)
    bad = PermutationCertificate(G, {"K2": 0, "K1": 0, "K0": 1}, 2 * mx.identity(4))
    assert not verify_certificate(M, bad)
