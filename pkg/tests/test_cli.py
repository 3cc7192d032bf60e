import json

import pytest

from permlat import io as jio
from permlat.cli import EXIT_INCONCLUSIVE, EXIT_INPUT, EXIT_OK, build_parser, main, run
from permlat.decomp import recognize_permutation
from permlat.exceptions import SchemaError
from permlat.fixtures import c2_mixed, fixture, fixture_names, paper_example
from permlat.hnn import make_presentation
from permlat.lattice import regular_lattice, trivial_lattice
from permlat.pgroup import bundled_group


def cli(*argv):
    return run(build_parser().parse_args(list(argv)))


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(path)


def test_recognize_paper_example():
    code, rep = cli("recognize", "--fixture", "paper-example")
    assert code == EXIT_OK and rep["status"] == "ok"
    assert rep["result"]["verdict"] == "NotPermutation"


def test_hnn_roundtrip_c2_mixed():
    code, rep = cli("hnn-roundtrip", "--fixture", "c2-mixed")
    assert code == EXIT_OK and rep["result"]["roundtrip"] is True
    assert rep["result"]["kernel_rank"] == 5


def test_recognize_malformed_json(tmp_path, capsys):
    lat = write(tmp_path, "bad.json", "{not json")
    assert main(["recognize", "--lattice", lat, "--group", lat]) == EXIT_INPUT
    rep = json.loads(capsys.readouterr().out)
    assert rep["status"] == "input-error" and rep["error"]["pointer"] == "/"


def test_schema_pointer_on_bad_shape(tmp_path):
    doc = jio.lattice_to_json(regular_lattice(bundled_group("c2")))
    doc["action"]["c"] = [[0, 1, 0], [1, 0, 0]]
    code, rep = cli("recognize", "--lattice", write(tmp_path, "l.json", doc))
    assert code == EXIT_INPUT and rep["error"]["pointer"].startswith("/action/c")


def test_non_unimodular_action_rejected(tmp_path):
    doc = jio.lattice_to_json(trivial_lattice(bundled_group("c2")))
    doc["action"]["c"] = [[2]]
    code, rep = cli("recognize", "--lattice", write(tmp_path, "l.json", doc))
    assert code == EXIT_INPUT


def test_prime_mismatch_and_unknown_fixture():
    assert cli("recognize", "--fixture", "paper-example", "--p", "3")[0] == EXIT_INPUT
    assert cli("recognize", "--fixture", "nope")[0] == EXIT_INPUT
    assert main(["no-such-command"]) == EXIT_INPUT


def test_weiss_generalized_inconclusive_is_byte_identical(capsys):
    outs = []
    for _ in range(2):
        assert main(["weiss-generalized", "--fixture", "paper-example"]) == EXIT_INCONCLUSIVE
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    rep = json.loads(outs[0])
    assert rep["status"] == "inconclusive" and rep["result"]["forced_rank"] == 1


def test_weiss_generalized_candidate_file(tmp_path):
    cand = write(tmp_path, "w.json", {"basis": [[1, 0, 0, 0, 0]]})
    code, rep = cli("weiss-generalized", "--fixture", "c2-mixed", "--subgroup", "c", "--candidate", cand)
    assert code == EXIT_OK and rep["result"]["consistent"]
    bad = write(tmp_path, "b.json", {"basis": [[0, 1, 0, 0, 0]]})
    assert cli("weiss-generalized", "--fixture", "c2-mixed", "--candidate", bad)[0] == EXIT_INPUT


def test_other_commands():
    code, rep = cli("cp-split", "--fixture", "sign-c2")
    assert code == EXIT_OK and rep["result"]["verdict"] == "NotPermutationOverC"
    code, rep = cli("cp-split", "--fixture", "paper-example")
    assert rep["result"]["verdict"] == "split"
    code, rep = cli("weiss-classic", "--fixture", "regular-c2xc2", "--subgroup", "c1")
    assert code == EXIT_OK and rep["result"]["hypotheses_hold"]
    code, rep = cli("necessity", "--fixture", "regular-d4", "--subgroup", "center")
    assert code == EXIT_OK and rep["result"]["passed"]
    assert cli("necessity", "--fixture", "paper-example")[0] == EXIT_INPUT
    code, rep = cli("subgroups", "--fixture", "d4")
    assert rep["result"]["subgroup_count"] == 10 and len(rep["result"]["classes"]) == 8
    code, rep = cli("hnn-synthesize", "--fixture", "c2-mixed")
    assert code == EXIT_OK and rep["result"]["kernel_rank"] == 5
    assert rep["result"]["free_product_quotient"]["free_rank"] == 2


def test_declined_brauer_route_is_inconclusive():
    code, rep = cli("recognize", "--fixture", "paper-example", "--method", "brauer")
    assert code == EXIT_INCONCLUSIVE and rep["status"] == "inconclusive"


def test_out_flag_and_timings(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["recognize", "--fixture", "regular-c4", "--out", str(out)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    rep = jio.loads(out.read_text())
    assert rep["result"]["verdict"] == "IsPermutation" and "timings" not in rep
    assert "timings" in cli("recognize", "--fixture", "regular-c4", "--timings")[1]


def test_embedded_certificate_reverifies(capsys):
    main(["recognize", "--fixture", "c2-mixed"])
    rep = json.loads(capsys.readouterr().out)
    cert = jio.certificate_from_json(rep["result"]["certificate"], c2_mixed())
    assert cert.nonzero() == {"K1": 1, "K0": 2}
    basis = [[int(i == j) for j in range(5)] for i in range(5)]
    basis[0][0] = 2
    tampered = dict(rep["result"]["certificate"], basis=basis)
    with pytest.raises(SchemaError):
        jio.certificate_from_json(tampered, c2_mixed())


def test_fixture_registry():
    names = fixture_names()
    assert {"paper-example", "sign-c2", "c2-mixed"} <= set(names)
    assert fixture("regular-q8").lattice.rank == 8
    assert fixture("heisenberg3").group.order == 27
    assert fixture("heisenberg3").lattice is None


def test_group_and_lattice_roundtrip(tmp_path):
    G = bundled_group("d4")
    G2 = jio.group_from_json(jio.loads(jio.dumps(jio.group_to_json(G))))
    assert G2.order == 8 and G2.generator_names == G.generator_names
    M = paper_example()
    M2 = jio.lattice_from_json(jio.loads(jio.dumps(jio.lattice_to_json(M))))
    assert M2.generator_matrices() == M.generator_matrices()
    # an inline group document and a file group both resolve
    g = write(tmp_path, "g.json", jio.group_to_json(M.group))
    lat = dict(jio.lattice_to_json(M), group=jio.group_to_json(M.group))
    code, rep = cli("recognize", "--group", g, "--lattice", write(tmp_path, "l.json", lat))
    assert code == EXIT_OK and rep["result"]["verdict"] == "NotPermutation"


def test_presentation_roundtrip(tmp_path):
    V = bundled_group("c2xc2")
    c1 = V.generated_subgroup([V.generators[0]])
    pres = make_presentation(V, [(c1, 2), (V.trivial_subgroup(), 1)])
    doc = jio.presentation_to_json(pres)
    back = jio.presentation_from_json(jio.loads(jio.dumps(doc)), V)
    assert [(e.subgroup, e.multiplicity) for e in back.edges] == [(e.subgroup, e.multiplicity) for e in pres.edges]
    code, rep = cli("hnn-roundtrip", "--fixture", "c2xc2", "--presentation", write(tmp_path, "p.json", doc))
    assert code == EXIT_OK and rep["result"]["roundtrip"] and rep["result"]["kernel_rank"] == 8


def test_dumps_is_canonical():
    v = recognize_permutation(regular_lattice(bundled_group("c2")))
    doc = jio.verdict_to_json(v)
    assert jio.dumps(doc) == jio.dumps(json.loads(jio.dumps(doc)))
