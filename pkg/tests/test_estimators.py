import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from permlat.estimators import CpSplitter, HnnSynthesizer, KrullSchmidtDecomposer, PermutationRecognizer, WeissChecker
from permlat.exceptions import InputError
from permlat.fixtures import c2_mixed, fixture, paper_example
from permlat.lattice import regular_lattice, scramble, sign_lattice
from permlat.pgroup import bundled_group


def test_params_roundtrip_and_clone():
    est = PermutationRecognizer(seed=3, method="krull-schmidt")
    assert est.get_params() == {"p": None, "cap": 64, "seed": 3, "method": "krull-schmidt"}
    est.set_params(cap=32)
    assert clone(est).get_params()["cap"] == 32
    assert WeissChecker(variant="classic").get_params()["subgroup"] == "center"


def test_recognizer_fit_transform_predict():
    M, _ = scramble(regular_lattice(bundled_group("c4")), 9)
    est = PermutationRecognizer()
    with pytest.raises(NotFittedError):
        est.transform(M)
    est.fit(M)
    assert est.is_permutation_ and est.multiplicities_ == {"K0": 1}
    T = est.transform(M)
    assert T.action == regular_lattice(M.group).action
    assert list(est.predict([M, sign_lattice(bundled_group("c2"))])) == [True, False]
    est = PermutationRecognizer().fit(paper_example())
    assert not est.is_permutation_ and est.witness_ is not None
    with pytest.raises(InputError):
        est.transform(paper_example())


def test_decomposer():
    est = KrullSchmidtDecomposer().fit(c2_mixed())
    assert sorted(est.summand_ranks_) == [1, 2, 2]


def test_weiss_checker_variants():
    R = regular_lattice(bundled_group("c2xc2"))
    assert WeissChecker(subgroup="c1", variant="classic").fit(R).predict()
    assert WeissChecker(subgroup="c1", variant="necessity").fit(R).predict()
    est = WeissChecker(subgroup="c1", variant="generalized").fit(paper_example())
    assert not est.predict() and est.report_.consistent
    with pytest.raises(InputError):
        WeissChecker(variant="bogus").fit(R)


def test_cp_splitter_and_hnn():
    M1, Mp = CpSplitter(subgroup="c1").fit_transform(paper_example())
    assert (M1.rank, Mp.rank) == (1, 2)
    est = HnnSynthesizer().fit(fixture("c2-mixed").lattice)
    assert est.kernel_rank_ == 5 and est.roundtrip_.ok and est.free_product_.free_rank == 2
    assert est.transform().rank == 5
    with pytest.raises(InputError):
        HnnSynthesizer().fit(paper_example())
