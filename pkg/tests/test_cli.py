import json
import subprocess
import sys
from pathlib import Path

import pytest

from opcheck.cli import main, run

GOLDEN = Path(__file__).parent / "golden"

CASES = {
    "operad_literal_3": ["verify", "operad", "--variant", "literal", "--max-size", "3"],
    "closure_literal_2": ["verify", "closure", "--variant", "literal", "--max-size", "2"],
    "phi_literal_3": ["verify", "phi", "--variant", "literal", "--max-size", "3"],
    "segal_literal_2": ["verify", "segal", "--variant", "literal", "--arity", "2"],
    "envelope_literal_1_1": ["verify", "envelope", "--variant", "literal",
                             "--max-size", "1", "--shape-bound", "1"],
    "envelope_strengthened_2_2": ["verify", "envelope", "--max-size", "2",
                                  "--shape-bound", "2"],
}


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden_reports(name):
    _, text = run(CASES[name])
    assert text + "\n" == (GOLDEN / f"{name}.json").read_text()


@pytest.mark.parametrize("argv,code", [
    (["verify", "operad", "--max-size", "2"], 0),
    (["verify", "operad", "--variant", "literal", "--max-size", "2"], 1),
    (["verify", "closure", "--max-size", "2"], 0),
    (["verify", "factorization", "--max-size", "2"], 0),
    (["verify", "phi", "--max-size", "2"], 0),
    (["mul", "--inputs", "a,m", "--output", "m"], 0),
    (["map", "3->2:2,0,1"], 0),
    (["hom", "(2|1)", "m"], 0),
    (["functor", "--algebra", "z2_additive.json", "--max-size", "2"], 0),
])
def test_exit_codes(argv, code):
    assert run(argv)[0] == code


@pytest.mark.parametrize("argv", [
    ["verify", "operad", "--max-size", "0"],
    ["verify", "operad", "--variant", "bogus"],
    ["map", "2->1:5,0"],
    ["hom", "(1|2)", "a"],
    ["mul", "--inputs", "a,q", "--output", "a"],
    ["functor", "--algebra", "nowhere.json"],
    ["functor", "--algebra", "z2_additive.json", "--check", "colour"],
    [],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_report_shape():
    code, text = run(["mul", "--inputs", "a,a", "--output", "a"])
    report = json.loads(text)
    assert code == 0
    assert {"command", "variant", "bounds", "verdict", "check", "witness",
            "details"} <= set(report)
    assert report["count"] == 1
    assert report["multimorphisms"] == ["(2|)->(1|):1,1"]
    assert "wall_time" not in report


def test_timing_is_opt_in():
    report = json.loads(run(["map", "1->1:1", "--timing"])[1])
    assert report["wall_time"] >= 0


def test_map_report():
    report = json.loads(run(["map", "2->1:0,0"])[1])
    # the empty fiber over 1 makes it neither inert nor active
    assert report["inert"] is False and report["active"] is False
    assert report["factorization"] == {"inert": "2->0:0,0", "active": "0->1:"}


def test_text_format():
    code, text = run(["hom", "m", "m", "--format", "text"])
    assert code == 0
    assert text.splitlines()[0] == "verdict: pass (hom)"
    assert "count: 1" in text


def test_dot_export(tmp_path):
    path = tmp_path / "cm.gv"
    assert run(["verify", "closure", "--max-size", "1", "--dot", str(path)])[0] == 0
    text = path.read_text()
    assert text.startswith("digraph") and '"(1|1)" -> "(1|)"' in text


def test_ceiling_env(monkeypatch):
    monkeypatch.setenv("OPCHECK_CEILING", "3")
    code, text = run(["verify", "envelope", "--max-size", "1", "--shape-bound", "1"])
    assert code == 2 and "ceiling" in json.loads(text)["error"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "opcheck", "mul", "--inputs", "m",
                           "--output", "a"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["count"] == 0
