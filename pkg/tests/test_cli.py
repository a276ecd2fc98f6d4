import json
from pathlib import Path

import pytest

from mcholonomy.cli import dump, main

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def report(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_validate_pass_and_fail(capsys):
    code, rep = report(capsys, "validate", DATA / "heisenberg.json")
    assert code == 0 and rep["status"] == "PASS"
    code, rep = report(capsys, "validate", DATA / "corrupted.json")
    assert code == 1 and rep["status"] == "FAIL"
    assert any("jacobi" in v and "['a']" in v for v in rep["violations"])


def test_fill_horn_third_edge(capsys):
    code, rep = report(capsys, "fill-horn", DATA / "heisenberg.json", DATA / "horn_xy.json")
    assert code == 0
    assert rep["third_edge"] == {"X": "1", "Y": "1", "Z": "1/2"}
    assert rep["thin"] and rep["gauge"]


def test_bch_with_holonomy_check(capsys):
    code, rep = report(capsys, "bch", DATA / "heisenberg.json", DATA / "pair_xy.json", "--check-holonomy")
    assert code == 0
    assert rep["bch"] == rep["holonomy"] == {"X": "1", "Y": "1", "Z": "1/2"}


def test_holonomy_of_a_path(capsys):
    code, rep = report(capsys, "holonomy", DATA / "heisenberg.json", DATA / "path.json")
    assert code == 0 and rep["gauge"]
    # a = 2 - 2t, b = 2t: z = 5/6, log correction -1/2
    assert rep["edge"] == {"X": "1", "Y": "1", "Z": "1/3"}


def test_mc_check(capsys, tmp_path):
    code, rep = report(capsys, "mc-check", DATA / "heisenberg.json", DATA / "path.json")
    assert code == 0
    bad = {
        "schema": "mc-holonomy/1",
        "n": 2,
        "element": {"X": {"n": 2, "terms": [{"exp": [1, 0], "ds": [2], "coef": "1"}]}},
    }
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(bad))
    code, rep = report(capsys, "mc-check", DATA / "heisenberg.json", f)
    assert code == 1


def test_kuranishi_and_transfer(capsys):
    code, rep = report(capsys, "kuranishi", DATA / "curved.json", DATA / "curved_contraction.json")
    assert code == 0 and rep["solution"] == {"b": "-1", "e": "-1/2"} and rep["residual"] == {}
    code, rep = report(capsys, "transfer", DATA / "massey.json", DATA / "massey_contraction.json")
    assert code == 0
    assert rep["algebra"]["brackets"] == [{"arity": 3, "in": ["a", "a", "a"], "out": [{"coef": "-3", "name": "m"}]}]


def test_dupont_verify(capsys):
    code, rep = report(capsys, "dupont-verify", "--n", 2)
    assert code == 0 and rep["status"] == "PASS"
    assert rep["s_terms"] == 6 and rep["p_rank"] == 7


def test_schema_violation_reports_a_pointer(capsys, tmp_path):
    doc = json.loads((DATA / "heisenberg.json").read_text())
    doc["basis"][1]["weight"] = 0
    f = tmp_path / "alg.json"
    f.write_text(json.dumps(doc))
    code, out, err = run(capsys, "validate", f)
    assert code == 2
    assert "#/basis/1/weight" in err


def test_missing_file_and_bad_json(capsys, tmp_path):
    code, _, err = run(capsys, "validate", tmp_path / "nope.json")
    assert code == 2
    f = tmp_path / "broken.json"
    f.write_text("{")
    code, _, err = run(capsys, "validate", f)
    assert code == 2


def test_cutoff_override_and_bad_flags(capsys):
    code, rep = report(capsys, "validate", DATA / "heisenberg.json", "--cutoff-w", 1)
    assert code == 0 and rep["cutoff"] == 1
    code, _, _ = run(capsys, "validate", DATA / "heisenberg.json", "--cutoff-w", 0)
    assert code == 2


def test_output_file_and_quiet(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, stdout, _ = run(capsys, "validate", DATA / "heisenberg.json", "-o", out)
    assert code == 0 and stdout == ""
    assert json.loads(out.read_text())["status"] == "PASS"
    code, stdout, stderr = run(capsys, "validate", DATA / "corrupted.json", "-q")
    assert code == 1 and stdout == "" and stderr == ""


@pytest.mark.parametrize(
    "argv",
    [
        ["fill-horn", DATA / "heisenberg.json", DATA / "horn_xy.json"],
        ["transfer", DATA / "massey.json", DATA / "massey_contraction.json"],
        ["holonomy", DATA / "heisenberg.json", DATA / "path.json"],
    ],
)
def test_output_is_canonical_and_deterministic(capsys, argv):
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    assert dump(json.loads(first)) == first


def test_transfer_output_reparses_as_an_algebra(capsys, tmp_path):
    _, rep = report(capsys, "transfer", DATA / "massey.json", DATA / "massey_contraction.json")
    f = tmp_path / "small.json"
    f.write_text(json.dumps(rep["algebra"]))
    code, again = report(capsys, "validate", f)
    assert code == 0 and again["dimension"] == 2
