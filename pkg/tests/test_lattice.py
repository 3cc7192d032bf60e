import pytest
from hypothesis import given, settings, strategies as st

from permlat import _matrix as mx
from permlat.decomp import iso_indecomposable, recognize_permutation
from permlat.exceptions import GroupMismatch, NotAHomomorphism, NotASubgroup
from permlat.fixtures import paper_example
from permlat.lattice import (Lattice, coinvariants, direct_sum, hom_space, induce, invariants, invariants_lattice,
                             is_intertwiner, permutation_lattice, regular_lattice, restrict, scramble,
                             sign_lattice, trivial_lattice, zero_lattice)
from permlat.padic_linalg import is_saturated
from permlat.pgroup import bundled_group, bundled_group_names, classify_subgroups, subgroup_group

import oracles


def c1_of(G):
    return G.generated_subgroup([G.generators[0]])


def test_permutation_lattice_examples():
    G = bundled_group("d4")
    T = permutation_lattice(G, G.whole())
    assert T.rank == 1 and all(a == mx.identity(1) for a in T.action)
    assert permutation_lattice(G, G.trivial_subgroup()).rank == 8
    V = bundled_group("c2xc2")
    L = permutation_lattice(V, c1_of(V))
    mats = L.generator_matrices()
    assert L.rank == 2
    assert mats["c1"] == mx.identity(2)
    assert mx.to_lists(mats["c2"]) == [[0, 1], [1, 0]]


def test_permutation_lattice_rejects_non_subgroup():
    with pytest.raises(NotASubgroup):
        permutation_lattice(bundled_group("c4"), [0, 1])


def test_homomorphism_checked():
    G = bundled_group("c2")
    with pytest.raises(NotAHomomorphism):
        Lattice.from_generators(G, {"c": [[1, 1], [0, 1]]})
    with pytest.raises(Exception):
        Lattice.from_generators(G, {"c": [[2]]})


def test_direct_sum_examples():
    G = bundled_group("c2")
    T = trivial_lattice(G)
    assert direct_sum(T, zero_lattice(G)).rank == 1
    assert direct_sum(T, T).action == trivial_lattice(G, 2).action
    S = direct_sum(regular_lattice(G), T)
    assert S.rank == 3
    Lattice(G, S.action, check=True)
    with pytest.raises(GroupMismatch):
        direct_sum(T, trivial_lattice(bundled_group("c4")))


def test_restrict_examples():
    V = bundled_group("c2xc2")
    R = regular_lattice(V)
    assert restrict(R, V.whole()) is R
    v = recognize_permutation(restrict(R, c1_of(V)))
    assert v.certificate.nonzero() == {"K0": 2}


def test_restrict_paper_example():
    M = paper_example()
    v = recognize_permutation(restrict(M, c1_of(M.group)))
    # over N = C2, K1 = N (trivial summand), K0 = {1} (regular summand)
    assert v.certificate.nonzero() == {"K1": 1, "K0": 1}


def test_invariants_examples():
    G = bundled_group("q8")
    inv = invariants(regular_lattice(G), G.whole())
    assert inv.rank == 1 and mx.columns(inv.basis)[0] in ([1] * 8, [-1] * 8)
    T = trivial_lattice(G, 3)
    assert invariants(T, c1_of(G)).rank == 3


def test_invariants_paper_example():
    M = paper_example()
    N = c1_of(M.group)
    assert invariants(M, N).rank == 2
    L = invariants_lattice(M, N)
    assert L.group.order == 2
    assert recognize_permutation(L).certificate.nonzero() == {"K0": 1}


def test_coinvariants_examples():
    G = bundled_group("c2")
    c = coinvariants(trivial_lattice(G, 2), G.whole())
    assert c.lattice.rank == 2 and not c.torsion_exponents
    c = coinvariants(regular_lattice(G), G.whole())
    assert c.lattice.rank == 1 and not c.torsion_exponents
    c = coinvariants(sign_lattice(G), G.whole())
    assert c.lattice.rank == 0 and list(c.torsion_exponents) == [1]


@pytest.mark.parametrize("name", ["c2", "c4", "c2xc2", "q8", "c3xc3"])
def test_coinvariants_match_invariants_on_order_p(name):
    G = bundled_group(name)
    for K in classify_subgroups(G).all_subgroups:
        if K.order != G.p:
            continue
        for L in classify_subgroups(G).class_reps:
            P = permutation_lattice(G, L)
            c = coinvariants(P, K)
            assert c.lattice.rank == invariants(P, K).rank and not c.torsion_exponents


def test_induce_examples():
    G = bundled_group("d4")
    K = classify_subgroups(G).class_reps[2]
    sg = subgroup_group(G, K)
    ind = induce(K, trivial_lattice(sg.group), G)
    assert iso_indecomposable(ind, permutation_lattice(G, K)).isomorphic
    R = regular_lattice(G)
    assert induce(G.whole(), R, G) is R
    v = recognize_permutation(induce(K, regular_lattice(sg.group), G))
    assert v.certificate.nonzero() == {"K0": 1}


def test_hom_space_examples():
    G = bundled_group("c2")
    assert len(hom_space(trivial_lattice(G), trivial_lattice(G)).basis) == 1
    assert len(hom_space(trivial_lattice(G), sign_lattice(G)).basis) == 0
    R = regular_lattice(G)
    H = hom_space(R, R)
    assert len(H.basis) == 2
    assert all(is_intertwiner(T, R, R) for T in H.basis)


@pytest.mark.parametrize("name", ["c2", "c4", "c2xc2", "d4", "q8"])
def test_hom_rank_against_rational_oracle(name):
    G = bundled_group(name)
    reps = classify_subgroups(G).class_reps
    for A in reps:
        for B in reps:
            PA, PB = permutation_lattice(G, A), permutation_lattice(G, B)
            want = oracles.hom_rank([mx.to_lists(PA.action[g]) for g in G.generators],
                                    [mx.to_lists(PB.action[g]) for g in G.generators])
            assert len(hom_space(PA, PB).basis) == want


@pytest.mark.parametrize("name", ["c4", "c2xc2", "d4", "q8", "c3xc3"])
def test_frobenius_reciprocity_ranks(name):
    G = bundled_group(name)
    cls = classify_subgroups(G)
    targets = [permutation_lattice(G, L) for L in cls.class_reps]
    for K in cls.class_reps:
        sg = subgroup_group(G, K)
        for L in (trivial_lattice(sg.group), regular_lattice(sg.group)):
            ind = induce(K, L, G)
            for B in targets:
                assert len(hom_space(ind, B).basis) == len(hom_space(L, restrict(B, K)).basis)


@pytest.mark.parametrize("name", bundled_group_names())
def test_orbit_count_law(name):
    G = bundled_group(name)
    subs = classify_subgroups(G).all_subgroups
    for L in subs:
        P = permutation_lattice(G, L)
        for K in subs:
            inv = invariants(P, K)
            assert inv.saturated and is_saturated(inv.basis, G.p)
            # fixed points of a normal subgroup are G-stable
            assert inv.invariant == K.is_normal
            cosets = {frozenset(G.mul[g][l] for l in L.elements) for g in range(G.order)}
            orbits = {frozenset(frozenset(G.mul[k][x] for x in c) for k in K.elements) for c in cosets}
            assert inv.rank == len(orbits)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["c2", "c4", "c2xc2", "d4", "q8"]), st.integers(0, 10_000))
def test_scramble_preserves_module(name, seed):
    G = bundled_group(name)
    R = direct_sum(regular_lattice(G), trivial_lattice(G))
    S, P = scramble(R, seed)
    assert abs(P.det()) == 1
    # P^-1 rho P == rho', i.e. P rho' == rho P
    assert all(P * S.action[g] == R.action[g] * P for g in range(G.order))
    Lattice(G, S.action, check=True)
