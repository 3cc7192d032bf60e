import flint
import pytest
from hypothesis import given, settings, strategies as st

from permlat.exceptions import CandidateInvalid, NotNormal, PreconditionFailed, SearchInconclusive, WrongOrder
from permlat.fixtures import contains, paper_example, random_permutation_construction
from permlat.lattice import (direct_sum, invariants, permutation_lattice, regular_lattice, sublattice,
                             trivial_lattice)
from permlat.pgroup import bundled_group, center, central_order_p_subgroups, classify_subgroups
from permlat.weiss import (FAIL, INCONCLUSIVE, PASS, TrivialPartCandidate, check_weiss_classic,
                           check_weiss_generalized, forced_trivial_rank, necessity_check)

V = bundled_group("c2xc2")
C1 = V.generated_subgroup([V.generators[0]])


def test_classic_regular():
    r = check_weiss_classic(regular_lattice(V), C1)
    assert r.hypothesis_i.status == PASS and r.hypothesis_ii.status == PASS
    assert r.conclusion_check.is_permutation and r.consistent
    assert r.hypothesis_ii.certificate.nonzero() == {"K0": 1}


def test_classic_paper_example_fails_freeness():
    r = check_weiss_classic(paper_example(), C1)
    assert r.hypothesis_i.status == FAIL
    assert r.hypothesis_i.evidence["multiplicities"] == {"K1": 1, "K0": 1}
    assert r.consistent


def test_classic_trivial_lattice_boundary():
    T = trivial_lattice(V)
    assert check_weiss_classic(T, C1).hypothesis_i.status == FAIL
    r = check_weiss_classic(T, V.trivial_subgroup())
    assert r.hypothesis_i.status == PASS and r.conclusion_check.is_permutation


def test_classic_rejects_non_normal():
    D4 = bundled_group("d4")
    K = next(K for K in classify_subgroups(D4).all_subgroups if not K.is_normal)
    with pytest.raises(NotNormal):
        check_weiss_classic(regular_lattice(D4), K)


def test_classic_large_normal_subgroup():
    C8 = bundled_group("c8")
    N = next(K for K in classify_subgroups(C8).all_subgroups if K.order == 4)
    r = check_weiss_classic(regular_lattice(C8), N)
    assert r.hypotheses_hold and r.conclusion_check.is_permutation and r.consistent


def test_generalized_paper_example_inconclusive():
    M = paper_example()
    assert forced_trivial_rank(M, C1, None) == 1
    r = check_weiss_generalized(M, C1)
    assert r.hypothesis_i.status == INCONCLUSIVE
    assert r.hypothesis_ii.status == PASS
    assert not r.conclusion_check.is_permutation and r.consistent
    # oracle: both rank-1 invariant saturated candidates, up to sign
    spans = {tuple(c["basis"][0]) for c in r.hypothesis_i.evidence["candidates"]}
    canon = {v if v[next(i for i, x in enumerate(v) if x)] > 0 else tuple(-x for x in v) for v in spans}
    assert canon == {(0, 1, 1), (2, 1, 1)}
    assert not any(c["quotient_free"] for c in r.hypothesis_i.evidence["candidates"])
    with pytest.raises(SearchInconclusive) as exc:
        check_weiss_generalized(M, C1, raise_inconclusive=True)
    assert exc.value.report is not None


def test_generalized_supplied_candidate_trivial_block():
    C2 = bundled_group("c2")
    M = direct_sum(trivial_lattice(C2), regular_lattice(C2))
    W = sublattice(M, flint.fmpz_mat([[1], [0], [0]]))
    r = check_weiss_generalized(M, C2.whole(), TrivialPartCandidate(W))
    assert r.hypothesis_i.status == PASS and r.hypothesis_ii.status == PASS
    assert r.conclusion_check.is_permutation and r.consistent
    assert r.witness.basis.rank == r.forced_rank == 1
    r = check_weiss_generalized(M, C2.whole())
    assert r.hypothesis_i.status == PASS and r.witness.provenance == "canonical-search"


def test_generalized_candidate_invalid():
    C2 = bundled_group("c2")
    M = direct_sum(trivial_lattice(C2), regular_lattice(C2))
    not_trivial = sublattice(M, flint.fmpz_mat([[0], [1], [0]]))
    with pytest.raises(CandidateInvalid):
        check_weiss_generalized(M, C2.whole(), not_trivial)
    not_saturated = sublattice(M, flint.fmpz_mat([[2], [0], [0]]))
    with pytest.raises(CandidateInvalid):
        check_weiss_generalized(M, C2.whole(), not_saturated)


def test_generalized_wrong_order():
    C4 = bundled_group("c4")
    with pytest.raises(WrongOrder):
        check_weiss_generalized(regular_lattice(C4), C4.whole())


def test_generalized_d4_construction():
    D4 = bundled_group("d4")
    Z = center(D4)
    for seed in range(5):
        c = random_permutation_construction(D4, seed)
        W = c.columns_for(lambda K: contains(K, Z))
        r = check_weiss_generalized(c.lattice, Z, TrivialPartCandidate(sublattice(c.lattice, W), "construction"))
        assert r.hypotheses_hold and r.conclusion_check.is_permutation and r.consistent
        assert r.witness.basis.rank == r.forced_rank


def test_necessity_examples():
    N = C1
    M = permutation_lattice(V, N)
    r = necessity_check(M, N)
    assert r.passed and r.trivial_part_rank == M.rank
    r = necessity_check(regular_lattice(V), N)
    assert r.passed and r.trivial_part_rank == 0
    with pytest.raises(PreconditionFailed):
        necessity_check(paper_example(), N)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["c2", "c4", "c2xc2", "d4", "q8", "c8", "c3xc3", "heisenberg3"]), st.integers(0, 10_000))
def test_necessity_and_rank_formula(name, seed):
    G = bundled_group(name)
    c = random_permutation_construction(G, seed, max_rank=24)
    for N in central_order_p_subgroups(G):
        r = necessity_check(c.lattice, N, seed=seed)
        assert r.passed
        p = G.p
        rn = invariants(c.lattice, N).rank
        assert r.trivial_part_rank == (p * rn - c.lattice.rank) // (p - 1)
