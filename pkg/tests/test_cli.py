import json
from pathlib import Path

from qtoric.cli import main

DOCS = Path(__file__).resolve().parent.parent / "documents"


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, out


def test_validate_exmax(capsys):
    code, out = _run(capsys, "validate", DOCS / "exmax.json")
    report = json.loads(out)
    assert code == 0 and report["passed"]
    assert report["inputs"][0]["file"] == "exmax.json" and len(report["inputs"][0]["sha256"]) == 64
    assert report["results"]["cones"] == 10


def test_chart_exmax_kernel(capsys):
    code, out = _run(capsys, "chart", DOCS / "exmax.json", "--cone", "0")
    res = json.loads(out)["results"]
    assert code == 0
    assert res["ker_basis"] == [["-1", "1", "-1", "1"]]
    assert res["identity_holds"] and res["presented_torus"]["passed"]
    assert res["stabilizer"]["verdict"] == "distinct"


def test_chart_irrational(capsys):
    code, out = _run(capsys, "chart", DOCS / "exmax_irrational.json")
    res = json.loads(out)["results"]
    assert code == 0 and len(res["ker_basis"]) == 1
    assert res["non_calibrated"]["band_rank"] == 0


def test_morphism_pass_and_fail(capsys):
    line = DOCS / "line.json"
    code, out = _run(capsys, "morphism", line, line, DOCS / "line_doubling.json")
    assert code == 0 and json.loads(out)["results"]["glue_compatibility"]["passed"]
    code, out = _run(capsys, "morphism", line, line, DOCS / "line_flip_bad.json")
    report = json.loads(out)
    assert code == 1 and not report["passed"]
    axioms = {a["axiom"]: a for a in report["results"]["validation"]["axioms"]}
    assert not axioms["diagram"]["passed"] and axioms["diagram"]["witnesses"]


def test_classical_and_gale(capsys):
    code, out = _run(capsys, "classical", DOCS / "exmax.json", "--degree-bound", "4")
    res = json.loads(out)["results"]
    assert code == 0 and len(res["hilbert"]) == 4 and len(res["relations"]) == 1
    assert res["class_group"] == {"free_rank": 1, "torsion": []}
    code, out = _run(capsys, "gale", DOCS / "quantum_line.json")
    assert code == 0
    code, out = _run(capsys, "classical", DOCS / "quantum_line.json")
    assert code == 2 and json.loads(out)["error"]["type"] == "ValueError"


def test_glue_and_git(capsys):
    code, out = _run(capsys, "glue", DOCS / "quantum_line.json")
    assert code == 0 and json.loads(out)["results"]["passed"]
    code, out = _run(capsys, "git", DOCS / "exmax.json")
    assert code == 0 and json.loads(out)["results"]["A"] == [0, 1, 2, 3]


def test_errors_exit_two(capsys, tmp_path):
    code, out = _run(capsys, "validate", tmp_path / "missing.json")
    assert code == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 1, "cones": []}')
    code, out = _run(capsys, "validate", bad)
    err = json.loads(out)["error"]
    assert code == 2 and err["type"] == "SchemaError" and err["path"] == "/calibration"
    code, out = _run(capsys, "plot", DOCS / "exmax_nonmax.json")
    assert code == 2
    code, _ = _run(capsys, "chart", DOCS / "exmax.json", "--cone", "99")
    assert code == 2
    assert main(["nonsense"]) == 2


def test_deterministic_and_out(capsys, tmp_path):
    _, first = _run(capsys, "glue", DOCS / "exmax.json")
    _, second = _run(capsys, "glue", DOCS / "exmax.json")
    assert first == second
    target = tmp_path / "r.json"
    code, out = _run(capsys, "glue", DOCS / "exmax.json", "--out", target)
    assert code == 0 and out == "" and target.read_text() == first


def test_timing_opt_in(capsys):
    _, out = _run(capsys, "validate", DOCS / "line.json", "--timing")
    assert "timing_seconds" in json.loads(out)
    _, out = _run(capsys, "validate", DOCS / "line.json")
    assert "timing_seconds" not in json.loads(out)


def test_plot(capsys, tmp_path):
    code, out = _run(capsys, "plot", DOCS / "exmax.json")
    assert code == 0 and out.startswith("<svg")
