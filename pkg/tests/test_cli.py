import json
import subprocess
import sys

import pytest

from apnlab.cli import main, parse_range
from apnlab.functions import read_table


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_range():
    assert parse_range("3..5") == [3, 4, 5]
    assert parse_range("6,4, 4") == [4, 6]
    assert parse_range("7") == [7]


def test_construct_auto_and_file(tmp_path, capsys):
    path = tmp_path / "f.tbl"
    code, _, err = run(capsys, "construct", "--m", "3", "--k", "1", "--alpha", "auto", "-o", str(path))
    assert code == 0 and "wrote 64 entries" in err
    F = read_table(path)
    assert F.m == 3 and F.k == 1 and F.alpha == 2


def test_construct_rejects_alpha(capsys):
    code, out, err = run(capsys, "construct", "--m", "3", "--k", "1", "--alpha", "1")
    assert code == 2 and out == ""
    assert "root X=0x2" in err


@pytest.mark.parametrize("argv", [
    ["construct", "--m", "4", "--k", "2"],
    ["construct", "--m", "3", "--k", "1", "--orig"],
    ["verify", "--m", "6", "--checks", "stabilizer"],
    ["verify", "--m", "3", "--checks", "bogus"],
    ["construct", "--m", "3", "--k", "1", "--alpha", "zz"],
])
def test_usage_errors(argv, capsys):
    assert run(capsys, *argv)[0] == 2


def test_analyze_outputs(tmp_path, capsys):
    path = tmp_path / "f.tbl"
    run(capsys, "construct", "--m", "4", "--k", "1", "-o", str(path))
    code, out, _ = run(capsys, "analyze", str(path), "--apn", "--image", "--walsh", "--degree")
    assert code == 0
    assert "APN: true, delta=2" in out
    assert "3-to-1: true, image=86" in out
    assert "classical: true" in out
    assert "algebraic degree: 2" in out
    code, out, _ = run(capsys, "analyze", str(path), "--all", "--json", "--csv", str(tmp_path / "csv"))
    rep = json.loads(out)
    assert rep["apn"] == {"apn": True, "delta": 2}
    assert rep["convention"]["field_poly"] == "0x13"
    assert rep["walsh"]["abs_counts"] == {"0": 16320, "16": 43520, "32": 5440}
    assert (tmp_path / "csv" / "walsh_abs.csv").read_text().splitlines()[0] == "abs_walsh,count"


def test_analyze_bad_file(tmp_path, capsys):
    bad = tmp_path / "bad.tbl"
    bad.write_text("APNTBL v1 m=2 k=1 alpha=-\n0 0\n")
    code, _, err = run(capsys, "analyze", str(bad))
    assert code == 3 and "line" in err
    assert run(capsys, "analyze", str(tmp_path / "missing.tbl"))[0] == 3


def test_verify_pass_fail_and_determinism(capsys):
    argv = ["verify", "--m", "3..4", "--checks", "apn,alpha-count,walsh", "--jobs", "1"]
    code, out1, _ = run(capsys, *argv)
    assert code == 0 and "summary: 6/6 passed" in out1
    assert "literature 1344: disagree" in out1
    assert run(capsys, *argv)[1] == out1
    code, out, _ = run(capsys, "verify", "--m", "3", "--checks", "apn", "--inject-fault", "--jobs", "1")
    assert code == 1 and "[FAIL]" in out


def test_verify_all_skips_out_of_range(capsys):
    code, out, _ = run(capsys, "verify", "--m", "8", "--json", "--jobs", "1")
    rep = json.loads(out)
    assert code == 0 and rep["passed"]
    assert [r["check"] for r in rep["results"]] == ["alpha-count"]
    assert {"check": "stabilizer", "m": 8} in rep["skipped"]


def test_orbit(capsys):
    code, out, _ = run(capsys, "orbit", "--m", "3", "--k", "1")
    rep = json.loads(out)
    assert code == 0
    assert rep["stabilizer_size"] == 21 and rep["orbit_size"] == 1176
    assert rep["orbit_stabilizer_consistent"]


def test_equiv_roundtrip(tmp_path, capsys):
    f, g, w = tmp_path / "f.tbl", tmp_path / "g.tbl", tmp_path / "w.txt"
    run(capsys, "construct", "--m", "5", "--k", "1", "--alpha", "1", "-o", str(f))
    run(capsys, "construct", "--m", "5", "--k", "1", "--alpha", "7", "-o", str(g))
    assert run(capsys, "equiv", "alpha", "--m", "5", "--k", "1", "--alpha1", "1", "--alpha2", "7",
               "-o", str(w))[0] == 0
    code, out, _ = run(capsys, "equiv", "check", str(f), str(g), str(w))
    assert code == 0 and "true" in out
    code, out, _ = run(capsys, "equiv", "check", str(g), str(f), str(w))
    assert code == 1 and "false" in out


def test_equiv_classes_and_inverse_sigma(capsys):
    code, out, _ = run(capsys, "equiv", "classes", "--m", "5")
    rep = json.loads(out)
    assert code == 0 and rep["classes"] == [[1, 4], [2, 3]] and rep["expected"] == 2
    code, out, _ = run(capsys, "equiv", "inverse-sigma", "--m", "5", "--k", "2")
    assert code == 0 and out.startswith("# witness")


def test_field_poly_override(tmp_path, capsys, monkeypatch):
    # record the original state so teardown undoes what the CLI sets
    monkeypatch.setenv("APNLAB_FIELD_POLY_4", "13")
    path = tmp_path / "f.tbl"
    code, _, _ = run(capsys, "construct", "--m", "4", "--k", "1", "--field-poly", "19", "-o", str(path))
    assert code == 0
    code, out, _ = run(capsys, "analyze", str(path), "--apn", "--json", "--field-poly", "19")
    assert json.loads(out)["convention"]["field_poly"] == "0x19"


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "apnlab", "construct", "--m", "2", "--k", "1"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout.startswith("APNTBL v1 m=2 k=1 alpha=")
    assert len(r.stdout.splitlines()) == 17


def test_m6_auto_alpha(capsys):
    code, out, _ = run(capsys, "construct", "--m", "6", "--k", "1")
    assert code == 0
    header = out.splitlines()[0]
    assert header.startswith("APNTBL v1 m=6 k=1 alpha=") and not header.endswith("alpha=1")


def test_verify_class_count_m6(capsys):
    code, out, _ = run(capsys, "verify", "--m", "6", "--checks", "class-count", "--jobs", "1")
    assert code == 0 and "classes=[[1, 5]] expected=1" in out
