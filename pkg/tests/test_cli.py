from __future__ import annotations

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from gkm.cli import main

DATA = Path(__file__).parent / "data"
NEG = str(DATA / "negative_theta_local.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_canonical_cp3(capsys):
    code, out, _ = run(capsys, "canonical", "--space", "cpn:3", "--xi", "0,-1,-2,-3")
    assert code == 0
    doc = json.loads(out)
    p2 = next(t for t in doc["tables"] if t["owner"] == "p2")
    assert p2["values"]["p4"] == "x1 - x4"
    assert doc["verified"] and doc["all_positive"]


def test_canonical_blowup_refused(capsys):
    code, out, err = run(capsys, "canonical", "--space", "blowup_cp2", "--xi", "1,-1")
    assert code == 2 and out == ""
    doc = json.loads(err)
    assert "index-increasing hypothesis fails" in doc["message"]
    assert doc["details"]["violations"] == [["p2", "p3"]]


def test_text_errors_are_plain(capsys):
    code, _, err = run(capsys, "canonical", "--space", "blowup_cp2", "--xi", "1,-1", "--format", "text")
    assert code == 2 and err.startswith("gkm: index-increasing hypothesis fails")


def test_solve_blowup_infeasible(capsys):
    code, out, _ = run(capsys, "solve", "--space", "blowup_cp2", "--xi", "1,-1", "--vertex", "p2")
    assert code == 0
    res = json.loads(out)["results"][0]
    assert res["status"] == "Infeasible"
    assert res["certificate"] and ["p2", "p3"] in res["edges"]


def test_solve_unique(capsys):
    code, out, _ = run(capsys, "solve", "--space", "cpn:2", "--xi", "0,-1,-2", "--vertex", "p2")
    assert code == 0
    assert json.loads(out)["results"][0]["table"]["values"]["p3"] == "x1 - x3"


def test_non_generic_refused(capsys):
    code, _, err = run(capsys, "morse", "--space", "cpn:2", "--xi", "1,1,0")
    assert code == 2 and json.loads(err)["error"] == "non_generic"


def test_rational_xi_accepted(capsys):
    code, out, _ = run(capsys, "morse", "--space", "cpn:2", "--xi", "0,-1/2,-3/2")
    assert code == 0 and json.loads(out)["index_increasing"] is True


@pytest.mark.parametrize(
    "argv",
    [
        ["validate"],
        ["validate", "--space", "cpn:2", "--graph", "x.json"],
        ["canonical", "--space", "cpn:2"],
        ["validate", "--graph", "/no/such/file.json"],
        ["validate", "--space", "nosuch:3"],
        ["morse", "--space", "cpn:2", "--xi", "0,1"],
        ["billey", "--n", "3", "--sigma", "112", "--mu", "123"],
    ],
)
def test_usage_and_io_errors_exit_one(capsys, argv):
    with pytest.raises(SystemExit) as info:
        raise SystemExit(main(argv))
    assert info.value.code == 1


def test_schema_error_is_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim_t": 2, "vertices": []}')
    code, _, err = run(capsys, "validate", "--graph", str(bad))
    assert code == 1 and json.loads(err)["error"] == "input_error"


def test_validate_reports(capsys):
    code, out, _ = run(capsys, "validate", "--space", "flag:3")
    assert code == 0 and json.loads(out)["valid"] is True
    code, out, _ = run(capsys, "validate", "--graph", NEG, "--format", "text")
    assert code == 0 and out.startswith("invalid") and "irregular_valence" in out


def test_theta_methods_agree(capsys):
    outs = {}
    for method in ("projection", "modular", "both"):
        code, out, _ = run(capsys, "theta", "--graph", NEG, "--xi", "2,1", "--method", method)
        assert code == 0
        outs[method] = json.loads(out)["edges"]
    assert outs["projection"] == outs["modular"] == outs["both"]
    assert {"from": "p", "to": "q", "theta": -1} in outs["both"]


def test_theta_reports_negative_edge(capsys):
    _, out, _ = run(capsys, "theta", "--graph", NEG, "--xi", "2,1")
    doc = json.loads(out)
    assert doc["all_positive"] is False and doc["negative_edges"] == [["p", "q"]]


def test_duals_and_structconsts(capsys):
    code, out, _ = run(capsys, "duals", "--space", "cpn:1", "--xi", "0,-1")
    assert code == 0
    tables = {t["owner"]: t["values"] for t in json.loads(out)["tables"]}
    assert tables["p2"]["p2"] == "1"
    code, out, _ = run(capsys, "structconsts", "--space", "cpn:2", "--xi", "0,-1,-2", "--p", "p2", "--q", "p2")
    rows = {r["r"]: r["c"] for r in json.loads(out)["constants"]}
    assert rows == {"p2": "x1 - x2", "p3": "1"}


def test_billey(capsys):
    code, out, _ = run(capsys, "billey", "--n", "3", "--sigma", "2,1,3", "--mu", "321")
    assert code == 0 and json.loads(out)["value"] == "x1 - x3"


def test_robust(capsys, tmp_path):
    code, out, _ = run(capsys, "robust", "--space", "cp1xcp1_twisted", "--xi", "1,1", "--fixture", "beta")
    assert code == 0 and json.loads(out)["classes"][0]["passed"] is True
    cls = tmp_path / "cls.json"
    cls.write_text(json.dumps({"owner": "beta", "values": {"SS": "2*x1*x2", "SN": "0", "NS": "0", "NN": "2*x1*x2"}}))
    code, out, _ = run(capsys, "robust", "--space", "cp1xcp1_twisted", "--xi", "1,1", "--class", str(cls))
    assert code == 0 and json.loads(out)["classes"][0]["passed"] is True
    code, out, _ = run(capsys, "robust", "--space", "flag:3", "--xi", "0,-1,-2", "--format", "text")
    assert code == 0 and "FAIL" not in out and out.count("pass") == 6


def test_dot_and_output_file(capsys, tmp_path):
    target = tmp_path / "g.dot"
    code, out, _ = run(capsys, "dot", "--space", "cpn:1", "--output", str(target))
    assert code == 0 and out == ""
    assert target.read_text().startswith("graph GKM {")


def test_graph_file_input(capsys):
    code, out, _ = run(capsys, "canonical", "--graph", str(DATA / "golden" / "cp1xcp1_twisted.json"), "--xi", "1,1")
    assert code == 0
    values = {t["owner"]: t["values"] for t in json.loads(out)["tables"]}
    assert values["NN"]["NN"] == "4*x1*x2"


def test_output_is_deterministic():
    argv = [sys.executable, "-m", "gkm.cli", "canonical", "--space", "flag:3", "--xi", "0,-1,-2"]
    # different hash seeds would expose any dependence on set or dict iteration order
    first = subprocess.run(argv, capture_output=True, check=True, env={**os.environ, "PYTHONHASHSEED": "1"}).stdout
    second = subprocess.run(argv, capture_output=True, check=True, env={**os.environ, "PYTHONHASHSEED": "2"}).stdout
    assert first == second and first
