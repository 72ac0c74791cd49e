from __future__ import annotations

import json
import subprocess
import sys

import pytest

from costshare import badconfig, cli, io
from costshare.classes import fig1bc1


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    return json.loads(out)


def test_pos_of_lower_bound_fixture(capsys):
    doc = run_json(capsys, "pos", "--fixture", "pos-lower-bound", "--x", "1")
    assert doc["pos"] == "23/22"
    assert doc["schema_version"] == io.SCHEMA_VERSION


def test_enforce_fig1bc1_optimum(capsys):
    doc = run_json(capsys, "enforce", "--fixture", "fig1bc1", "--forest", "OPT")
    assert doc["enforceable"] is False and doc["lp_optimum"] == "21"
    assert doc["forest_cost"] == "22"


def test_enforce_emits_protocol(capsys):
    doc = run_json(capsys, "enforce", "--fixture", "fig1-shapley", "--protocol")
    assert doc["enforceable"] is True and doc["protocol"]


def test_detect_wheel7_none(capsys):
    doc = run_json(capsys, "detect-bc", "--fixture", "wheel7", "--terminals", "c0,c3,c1,z")
    assert doc["result"] == "none" and doc["prefilter"] == "no-bc-by-search"


def test_detect_and_witness(capsys, tmp_path):
    dot = tmp_path / "bc.dot"
    doc = run_json(capsys, "detect-bc", "--fixture", "planar-bc1a", "--dot", str(dot))
    assert doc["result"] == "BC1a"
    assert dot.read_text().startswith('graph "BC1a"')
    doc = run_json(capsys, "witness", "--fixture", "planar-bc1a")
    assert doc["min_cost"] == "22" and doc["opt_enforceable"] is False
    assert io.instance_from_json(doc["instance"]).graph.vertices


def test_classify_and_shares(capsys):
    assert run_json(capsys, "classify", "--fixture", "bc-minimal-BC3")["verdict"] == "NotEfficient"
    doc = run_json(capsys, "shares", "--fixture", "fig1bc1", "--max2")
    assert doc["totals"]["2"] == "12" and doc["case"] == "R"
    doc = run_json(capsys, "opt", "--fixture", "fig1bc1")
    assert doc["min_cost"] == "22" and doc["count"] == 1


def test_gen_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "gen", "fixture", "fig1bc1")
    assert code == 0
    assert io.loads_instance(out) == fig1bc1()
    path = tmp_path / "i.json"
    path.write_text(out)
    assert run_json(capsys, "opt", str(path))["min_cost"] == "22"
    code, out, _ = run(capsys, "gen", "wheel", "7")
    assert len(json.loads(out)["edges"]) == 14


def test_text_format(capsys):
    code, out, _ = run(capsys, "pos", "--fixture", "pos-lower-bound", "--format", "text")
    assert code == 0 and "pos: 23/22" in out.splitlines()


def test_environment_override(capsys, monkeypatch):
    monkeypatch.setenv("COSTSHARE_FORMAT", "text")
    code, out, _ = run(capsys, "pos", "--fixture", "pos-lower-bound")
    assert "pos: 23/22" in out


def test_malformed_input_exit_1(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": ["a", "b"],\n "edges": [{"id": "e", "u": "a", "v": "b", "cost": 1.5}],\n')
    code, _, err = run(capsys, "opt", str(bad))
    assert code == 1 and "line" in err
    doc = json.loads(io.dumps(io.instance_to_json(fig1bc1())))
    doc["edges"][2]["cost"] = 1.5
    bad.write_text(json.dumps(doc))
    code, _, err = run(capsys, "opt", str(bad))
    assert code == 1 and "edges[2].cost" in err
    assert run(capsys, "detect-bc", "--fixture", "wheel7")[0] == 1
    assert run(capsys, "opt", "--fixture", "nope")[0] == 1


def test_budget_exit_2(capsys):
    assert run(capsys, "detect-bc", "--fixture", "complete8", "--terminals", "k0,k1,k2,k3", "--search-cap", "3")[0] == 2
    assert run(capsys, "opt", "--fixture", "complete8", "--terminals", "k0,k1,k2,k3", "--path-cap", "10")[0] == 2


def test_consistency_exit_3(capsys, monkeypatch):
    monkeypatch.setattr(badconfig, "validate_embedding", lambda emb, g: False)
    code, _, err = run(capsys, "detect-bc", "--fixture", "planar-bc1a")
    assert code == 3 and "consistency" in err


def test_reruns_are_byte_identical():
    argv = [sys.executable, "-m", "costshare.cli", "shares", "--fixture", "fig1bc1", "--pl"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second and first.endswith(b"\n")


def test_selftest_passes(capsys):
    code, out, _ = run(capsys, "selftest", "--format", "text")
    assert code == 0
    assert all(line.startswith("PASS") for line in out.splitlines())
