import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from sepconv import formats
from sepconv.cli import main, parse_sweep
from sepconv.stabilizer import Graph
from sepconv.tensor import LocalOperator

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_sep1_infeasible(capsys):
    code, out, _ = run(capsys, "check-sep1", "--instance", DATA / "five_ring.json", "--a", 0.25)
    rep = json.loads(out)
    assert code == 1 and rep["verdict"] == "Infeasible"
    assert rep["farkas"] and rep["obstruction"][0][0] == "+ZXZII"


def test_check_sep1_three_ring_is_inconclusive(capsys):
    code, out, _ = run(capsys, "check-sep1", "--instance", DATA / "three_ring.json", "--a", 0.25)
    assert code == 1 and json.loads(out)["verdict"] == "Inconclusive"


def test_check_sep1_feasible_explicit(tmp_path, capsys):
    inst = {"graph": formats.graph_to_json(Graph.ring(3)),
            "h": formats.operator_to_json(LocalOperator.identity((2, 2, 2)))}
    path = tmp_path / "id.json"
    path.write_text(json.dumps(inst))
    code, out, _ = run(capsys, "check-sep1", "--instance", path)
    assert code == 0 and json.loads(out)["verdict"] == "Feasible"


def test_sweep_output_order(capsys):
    code, out, _ = run(capsys, "obstruction", "--instance", DATA / "five_ring.json", "--a-sweep", "0.1:0.4:0.1")
    rep = json.loads(out)
    assert code == 1
    assert [r["a"] for r in rep] == pytest.approx([0.1, 0.2, 0.3, 0.4])
    for r in rep:
        value = dict((k, v) for k, v in r["report"]["obstruction"])["+ZXZII"]
        assert value[0] == pytest.approx(8 * r["a"] ** 3)


def test_parse_sweep():
    assert parse_sweep("0.1:0.3:0.1") == [0.1, 0.2, 0.3]
    with pytest.raises(formats.InputError):
        parse_sweep("0.1:0.3")
    with pytest.raises(formats.InputError):
        parse_sweep("0.3:0.1:0.1")


def test_check_witness_example(capsys):
    code, out, _ = run(capsys, "check-witness", "--instance", DATA / "five_ring.json", "--a", 0.2)
    assert code == 0 and json.loads(out)["verdict"] == "Feasible"


def test_trace_monotone(capsys):
    code, out, _ = run(capsys, "trace-monotone", "--instance", DATA / "five_ring.json", "--a", 0.2)
    rep = json.loads(out)
    assert code == 0
    assert rep["trace_H"] == pytest.approx(32 / (1 + 8 * 0.2**3))


@pytest.mark.parametrize("which", ["5q", "3q"])
def test_verify_example(which, capsys):
    code, out, _ = run(capsys, "verify-example", "--which", which, "--a", 0.3)
    assert code == 0 and json.loads(out)["verified"]


def test_verify_example_needs_a(capsys):
    code, _, err = run(capsys, "verify-example", "--which", "5q")
    assert code == 2 and "--a" in err


@pytest.mark.parametrize("name,size", [("ring5.json", 32), ("ring3.json", 8)])
def test_symmetry_audit(name, size, capsys):
    code, out, _ = run(capsys, "symmetry-audit", "--graph", DATA / name)
    rep = json.loads(out)
    assert code == 0 and rep["group_size"] == size and rep["passed"]


def test_locc_run(capsys):
    code, out, _ = run(capsys, "locc-run", "--protocol", DATA / "protocol_regular.json",
                       "--state", DATA / "ghz3.json", "--flatten")
    rep = json.loads(out)
    assert code == 0 and rep["total_prob"] == pytest.approx(1)
    code, out, _ = run(capsys, "locc-run", "--protocol", DATA / "protocol_projective.json",
                       "--state", DATA / "ghz3.json", "--flatten")
    assert code == 1 and "refused" in json.loads(out)["flattened"]


def test_singular_branch(capsys):
    code, out, _ = run(capsys, "singular-branch", "--op", DATA / "singular_op.json", "--state", DATA / "ghz3.json")
    assert code == 0
    code, out, _ = run(capsys, "singular-branch", "--trials", 20, "--dims", "2,3,3", "--seed", 7)
    assert code == 0 and json.loads(out)["failures"] == []


def test_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "check-sep1", "--instance", bad)
    assert code == 2 and err
    code, _, _ = run(capsys, "check-sep1", "--instance", tmp_path / "missing.json")
    assert code == 2


def test_missing_field(tmp_path, capsys):
    path = tmp_path / "inst.json"
    path.write_text(json.dumps({"graph": {"n": 3, "edges": [[1, 2], [2, 3], [1, 3]]}}))
    code, _, err = run(capsys, "check-sep1", "--instance", path)
    assert code == 2 and "h" in err


def test_bad_arguments(capsys):
    assert main(["no-such-command"]) == 2
    assert main(["verify-example", "--which", "7q", "--a", "0.2"]) == 2
    code, _, _ = run(capsys, "verify-example", "--which", "5q", "--a", 0.7)
    assert code == 2


def test_deterministic_output():
    cmd = [sys.executable, "-m", "sepconv", "check-sep1", "--instance", str(DATA / "five_ring.json"),
           "--a-sweep", "0.1:0.2:0.1"]
    first = subprocess.run(cmd, capture_output=True)
    second = subprocess.run(cmd, capture_output=True)
    assert first.returncode == 1
    assert first.stdout == second.stdout and first.stdout
