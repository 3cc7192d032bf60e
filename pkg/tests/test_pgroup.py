import pytest
from hypothesis import given, settings, strategies as st

from permlat.exceptions import NotASubgroup, NotNormal, OrderCapExceeded, OrderNotPPower
from permlat.pgroup import (PGroup, bundled_group, bundled_group_names, center, central_order_p_subgroups,
                            classify_subgroups, coset_transversal, from_permutations, normal_subgroups,
                            normalizer, orbit_count_on_cosets, quotient_group, subgroup_group)

import oracles


def test_from_permutations_examples():
    assert from_permutations([[[0, 1]]], 2).order == 2
    assert from_permutations([[[0, 1], [2, 3]], [[0, 2], [1, 3]]], 4).order == 4
    D4 = from_permutations([[[0, 1, 2, 3]], [[0, 2]]], 4)
    gens = [oracles.cycles_to_perm([[0, 1, 2, 3]], 4), oracles.cycles_to_perm([[0, 2]], 4)]
    assert D4.order == len(oracles.closure(gens, 4)) == 8


def test_image_tuple_generators_match_cycles():
    a = from_permutations([(1, 2, 3, 0)], 4)
    b = from_permutations([[[0, 1, 2, 3]]], 4)
    assert a.mul == b.mul


def test_order_errors():
    with pytest.raises(OrderNotPPower):
        from_permutations([[[0, 1, 2]], [[0, 1]]], 3)
    with pytest.raises(OrderNotPPower):
        from_permutations([[[0, 1]]], 2, p=3)
    with pytest.raises(OrderCapExceeded):
        from_permutations([[[i, i + 1] for i in range(0, 20, 2)][k:k + 1] for k in range(10)], 20, order_cap=256)


def test_table_axioms_checked():
    bad = [[0, 1], [1, 1]]
    with pytest.raises(Exception):
        PGroup(bad, [1])


@pytest.mark.parametrize("name,subs,classes", [("c2xc2", 5, 5), ("d4", 10, 8), ("q8", 6, 6)])
def test_classification_examples(name, subs, classes):
    G = bundled_group(name)
    cls = classify_subgroups(G)
    assert len(cls.all_subgroups) == subs and len(cls.class_reps) == classes
    # oracle: exhaustive subset enumeration
    brute = oracles.subgroups_by_subsets(G.mul)
    assert {frozenset(S.elements) for S in cls.all_subgroups} == set(brute)
    assert oracles.conjugacy_classes_of_subgroups(G.mul, brute) == classes


@pytest.mark.parametrize("name", bundled_group_names())
def test_classification_against_pair_closures(name):
    G = bundled_group(name)
    cls = classify_subgroups(G)
    assert {frozenset(S.elements) for S in cls.all_subgroups} == oracles.subgroups_by_pairs(G.mul)
    assert sum(cls.class_sizes) == len(cls.all_subgroups)
    for k, K in enumerate(cls.class_reps):
        assert cls.rep_index(K) == k
    sizes = [(K.order, K.elements) for K in cls.class_reps]
    assert sizes == sorted(sizes)
    assert cls.class_reps[0].order == 1


def test_heisenberg_order():
    G = bundled_group("heisenberg3")
    assert G.order == 27 and G.p == 3 and not G.is_abelian()


@pytest.mark.parametrize("name", bundled_group_names())
def test_element_orders_are_p_powers(name):
    G = bundled_group(name)
    for o in G.element_orders:
        assert o == 1 or oracles.valuation(o, G.p) > 0 and G.p ** oracles.valuation(o, G.p) == o


def test_transversal_examples():
    G = bundled_group("c2xc2")
    assert coset_transversal(G, G.whole()) == [0]
    assert sorted(coset_transversal(G, G.trivial_subgroup())) == list(range(4))
    c1 = G.generated_subgroup([G.generators[0]])
    tr = coset_transversal(G, c1)
    assert len(tr) == 2 and tr[0] == 0


@pytest.mark.parametrize("name", bundled_group_names())
def test_transversal_bijection(name):
    G = bundled_group(name)
    for K in classify_subgroups(G).all_subgroups:
        tr = coset_transversal(G, K)
        prods = sorted(G.mul[r][k] for r in tr for k in K.elements)
        assert prods == list(range(G.order))


def test_transversal_rejects_non_subgroup():
    G = bundled_group("c4")
    with pytest.raises(NotASubgroup):
        coset_transversal(G, [0, 1])


def test_orbit_count_examples():
    G = bundled_group("c2xc2")
    c1 = G.generated_subgroup([G.generators[0]])
    one = G.trivial_subgroup()
    assert orbit_count_on_cosets(G, one, c1) == 2
    assert orbit_count_on_cosets(G, G.whole(), one) == 1
    assert orbit_count_on_cosets(G, c1, one) == 2


@pytest.mark.parametrize("name", [n for n in bundled_group_names() if bundled_group(n).order <= 16])
def test_orbit_count_conjugation_invariant(name):
    G = bundled_group(name)
    cls = classify_subgroups(G)
    for K in cls.all_subgroups:
        Kr = cls.class_reps[cls.rep_index(K)]
        for L in cls.all_subgroups:
            assert orbit_count_on_cosets(G, K, L) == orbit_count_on_cosets(G, Kr, L)


def test_center_examples():
    Q8 = bundled_group("q8")
    assert center(Q8).order == 2
    A = bundled_group("c3xc3")
    assert center(A).order == A.order
    assert len(central_order_p_subgroups(bundled_group("c2xc2"))) == 3
    D4 = bundled_group("d4")
    assert center(D4).order == 2
    K = classify_subgroups(D4).class_reps[1]
    N = normalizer(D4, K)
    assert all(D4.conj(g, k) in K.elements for g in N.elements for k in K.elements)


def test_quotient_and_subgroup_groups():
    D4 = bundled_group("d4")
    Z = center(D4)
    Q = quotient_group(D4, Z)
    assert Q.group.order == 4 and Q.group.is_abelian()
    assert all(Q.projection[D4.mul[a][b]] == Q.group.mul[Q.projection[a]][Q.projection[b]]
               for a in range(8) for b in range(8))
    nonnormal = next(K for K in classify_subgroups(D4).all_subgroups if not K.is_normal)
    with pytest.raises(NotNormal):
        quotient_group(D4, nonnormal)
    S = subgroup_group(D4, nonnormal)
    assert S.group.order == nonnormal.order
    assert subgroup_group(D4, nonnormal) is S


def test_normal_subgroups_d4():
    assert len(normal_subgroups(bundled_group("d4"))) == 6


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(bundled_group_names()), st.data())
def test_conj_and_inverse_laws(name, data):
    G = bundled_group(name)
    g = data.draw(st.integers(0, G.order - 1))
    h = data.draw(st.integers(0, G.order - 1))
    assert G.mul[g][G.inverse[g]] == 0
    assert G.conj(g, G.mul[h][h]) == G.mul[G.conj(g, h)][G.conj(g, h)]
