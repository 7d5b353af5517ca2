import json

import pytest

from monodt.boolfn import candidate_fn, format_truth_table
from monodt.cli import main
from monodt.formats import artifact_tables, read_artifact

from conftest import tt

XOR2 = tt(2, "0110")
AND2 = tt(2, "0001")


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return _write


def test_alt(write, capsys):
    assert main(["alt", write("f.tt", format_truth_table(XOR2))]) == 0
    assert capsys.readouterr().out.strip() == "alt=2 uniform=true dtm=2 dtm_na=2"
    assert main(["alt", write("c.tt", format_truth_table(candidate_fn(4)))]) == 0
    assert capsys.readouterr().out.strip() == "alt=4 uniform=false dtm=3 dtm_na=4"


def test_alt_parse_error(write, capsys):
    assert main(["alt", write("bad.tt", "n=2\nzz\n")]) == 2
    assert "error" in capsys.readouterr().err


def test_alt_missing_file(capsys):
    assert main(["alt", "/nonexistent/f.tt"]) == 2


def test_max_n_cap(write, capsys):
    path = write("f.tt", format_truth_table(candidate_fn(4)))
    assert main(["alt", path, "--max-n", "3"]) == 2
    with pytest.raises(SystemExit):
        main(["alt", path, "--max-n", "99"])


@pytest.mark.parametrize("kind", ["alt", "threshold", "uniform"])
def test_decompose_kinds(write, tmp_path, kind):
    out = tmp_path / "d.txt"
    assert main(["decompose", write("f.tt", format_truth_table(XOR2)), "--kind", kind, "--out", str(out)]) == 0
    assert artifact_tables(read_artifact(out)) == [XOR2]


def test_decompose_uniform_rejects_nonuniform(write):
    assert main(["decompose", write("f.tt", format_truth_table(tt(2, "0100"))), "--kind", "uniform"]) == 2


@pytest.mark.parametrize("model", ["mdl", "mdt", "namdt", "nmdt"])
def test_build_models(write, tmp_path, model, capsys):
    out = tmp_path / "m.json"
    assert main(["build", write("f.tt", format_truth_table(XOR2)), "--model", model, "--out", str(out)]) == 0
    assert artifact_tables(read_artifact(out)) == [XOR2]
    err = capsys.readouterr().err
    assert ("length=3" if model == "mdl" else "height=2") in err


def test_convert_chain(write, tmp_path, capsys):
    src = write("f.tt", format_truth_table(candidate_fn(4)))
    lst, tree, back = (str(tmp_path / name) for name in ("l.json", "t.json", "b.json"))
    assert main(["build", src, "--model", "mdl", "--out", lst]) == 0
    assert main(["convert", lst, "--to", "mdt", "--out", tree]) == 0
    assert main(["convert", tree, "--from", "mdt", "--to", "mdl", "--out", back]) == 0
    assert "EQUIV" in capsys.readouterr().err
    assert main(["verify", src, back]) == 0


def test_convert_unsupported(write, capsys):
    assert main(["convert", write("f.tt", format_truth_table(XOR2)), "--to", "mdt"]) == 2
    assert "supported" in capsys.readouterr().err


def test_verify_not_equivalent(write, capsys):
    a = write("a.tt", format_truth_table(XOR2))
    b = write("b.tt", format_truth_table(AND2))
    assert main(["verify", a, b]) == 1
    assert capsys.readouterr().out.startswith("NOT-EQUIV")


def test_synth_mdt_from_circuit(write, capsys):
    path = write("c.net", "INPUTS 2\ng1=NOT(x1); g2=AND(g1,x2)\nOUTPUTS g2\n")
    assert main(["synth", "mdt_from_circuit", path, "--out", path + ".json"]) == 0
    out = capsys.readouterr().out
    assert "EQUIV" in out and "negations=1" in out


def test_synth_markov(write, tmp_path, capsys):
    out = tmp_path / "c.net"
    assert main(["synth", "markov", write("f.tt", format_truth_table(candidate_fn(4))), "--out", str(out)]) == 0
    assert "EQUIV" in capsys.readouterr().out
    assert artifact_tables(read_artifact(out)) == [candidate_fn(4)]


@pytest.mark.parametrize(
    "argv,negations",
    [
        (["inverter_sorted", "--m", "7"], 3),
        (["inverter_fischer", "--m", "3"], 2),
        (["inverter_blocks", "--m", "64", "--t", "4", "--levels", "2"], 20),
    ],
)
def test_synth_inverters(tmp_path, capsys, argv, negations):
    assert main(["synth", *argv, "--out", str(tmp_path / "inv.net")]) == 0
    out = capsys.readouterr().out
    assert f"negations={negations}" in out and "EQUIV" in out


def test_synth_inverter_needs_m(capsys):
    assert main(["synth", "inverter_sorted"]) == 2


def test_synth_circuit_from_mdl(write, tmp_path, capsys):
    src = write("f.tt", format_truth_table(XOR2))
    lst = str(tmp_path / "l.json")
    assert main(["build", src, "--model", "mdl", "--out", lst]) == 0
    assert main(["synth", "circuit_from_mdl", lst, "--out", str(tmp_path / "c.net")]) == 0
    assert "EQUIV" in capsys.readouterr().out


RMDT = {
    "kind": "rmdt",
    "n": 2,
    "queries": ["tt:8"],
    "root": {"q": 0, "c0": {"coin": True, "c0": {"leaf": 0}, "c1": {"leaf": 0}},
             "c1": {"coin": True, "c0": {"leaf": 1}, "c1": {"leaf": 1}}},
}


def test_rmdt_commands(write, tmp_path, capsys):
    path = write("r.json", json.dumps(RMDT))
    assert main(["rmdt", "prob", path, "--x", "3"]) == 0
    assert capsys.readouterr().out.strip() == "x=3 p=1"
    target = write("and.tt", format_truth_table(AND2))
    assert main(["rmdt", "computes", path, "--target", target, "--theta", "1/2"]) == 0
    assert capsys.readouterr().out.strip() == "true"
    for sub in ("normalize", "derandomize", "majority"):
        out = tmp_path / f"{sub}.json"
        assert main(["rmdt", sub, path, "--out", str(out)]) == 0
        assert artifact_tables(read_artifact(out)) == [AND2]


def test_rmdt_computes_false_and_bad_theta(write, capsys):
    path = write("r.json", json.dumps(RMDT))
    target = write("xor.tt", format_truth_table(XOR2))
    assert main(["rmdt", "computes", path, "--target", target]) == 1
    assert main(["rmdt", "computes", path, "--target", target, "--theta", "3/4"]) == 2


def test_rmdt_from_wrmdt(write, tmp_path, capsys):
    doc = {"kind": "wrmdt", "n": 2, "w": 2, "queries": ["tt:a", "tt:c"],
           "root": {"qset": [0, 1], "c0": {"leaf": 0}, "c1": {"leaf": 1}}}
    out = tmp_path / "r.json"
    assert main(["rmdt", "from_wrmdt", write("w.json", json.dumps(doc)), "--out", str(out)]) == 0
    assert "height=2" in capsys.readouterr().err


def test_selftest_quick(capsys):
    assert main(["selftest", "--level", "quick"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert sum(1 for line in lines if line.startswith("[")) == 15
