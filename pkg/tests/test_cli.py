import json
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from polycontract import __version__
from polycontract.cli import main
from polycontract.demos import DOCUMENTS, EX27_A0


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_machine(capsys, *argv):
    code, out = run(capsys, *argv, "--format", "machine")
    return code, json.loads(out)


def write(tmp_path, raw, name="doc.json"):
    path = tmp_path / name
    path.write_text(json.dumps(raw) if not isinstance(raw, str) else raw)
    return str(path)


def non_metric_document():
    n = 4
    D = [[int(i != j) for j in range(n)] for i in range(n)]
    for p, q, v in EX27_A0:
        i, j = int(p[1]) - 1, int(q[1]) - 1
        D[i][j] += int(v)
        D[j][i] += int(v)
    raw = json.loads(json.dumps(DOCUMENTS["ex2.7"]))
    raw["space"] = {"type": "finite", "points": ["x1", "x2", "x3", "x4"], "dist": D}
    return raw


def test_validate(capsys, tmp_path):
    code, rep = run_machine(capsys, "validate", write(tmp_path, DOCUMENTS["ex2.7"]))
    assert code == 0 and rep["metric"]["valid"]
    code, rep = run_machine(capsys, "validate", write(tmp_path, non_metric_document()))
    v = rep["metric"]["violation"]
    assert code == 1 and v["kind"] == "triangle" and v["witness"] == ["x2", "x1", "x4"]
    assert (v["left"], v["right"]) == ("7", "6")
    truncated = json.dumps(DOCUMENTS["ex2.7"])[:50]
    code, rep = run_machine(capsys, "validate", write(tmp_path, truncated))
    assert code == 2 and "line 1" in rep["error"]


def test_verify(capsys):
    code, rep = run_machine(capsys, "verify", "ex2.7")
    assert code == 0 and rep["verdict"]["min_feasible_lambda"] == "3/4" and rep["lower_bound"]["holds"]
    assert rep["verdict"]["worst_pair"] == ["x1", "x2"]
    code, rep = run_machine(capsys, "verify", "ex2.7", "--kind", "banach")
    assert code == 1 and rep["verdict"]["min_feasible_lambda"] == "1"
    code, rep = run_machine(capsys, "verify", "ex3.6")
    assert code == 0 and (rep["verdict"]["lhs"], rep["verdict"]["rhs"]) == ("2", "3")


def test_verify_reports_failing_witness(capsys, tmp_path):
    raw = json.loads(json.dumps(DOCUMENTS["ex2.7"]))
    raw["certificate"]["lambda"] = "1/2"
    code, rep = run_machine(capsys, "verify", write(tmp_path, raw))
    assert code == 1 and rep["verdict"]["status"] == "fail" and rep["verdict"]["lhs"] == "3"
    raw["certificate"]["lambda"] = "3/4"
    raw["certificate"]["A_j"] = "2"
    code, rep = run_machine(capsys, "verify", write(tmp_path, raw))
    assert code == 1 and not rep["lower_bound"]["holds"]
    code, rep = run_machine(capsys, "verify", write(tmp_path, non_metric_document()))
    assert code == 1 and "verdict" not in rep


def test_iterate(capsys):
    code, rep = run_machine(capsys, "iterate", "ex2.7", "--start", "x2", "--bound-check")
    assert code == 0 and rep["trace"]["limit"] == "x1" and rep["trace"]["steps"] == 3
    assert [r["bound"] for r in rep["bound"]["rows"][:3]] == ["16", "12", "9"]
    code, rep = run_machine(capsys, "iterate", "ex2.10", "--start", "1", "--bound-check")
    assert code == 0 and rep["trace"]["limit"] == "1/4"
    code, a = run_machine(capsys, "iterate", "ex3.6", "--start", "x3")
    code2, b = run_machine(capsys, "iterate", "ex3.6", "--start", "x2")
    assert code == code2 == 0 and (a["trace"]["limit"], b["trace"]["limit"]) == ("x1", "x2")


def test_iterate_errors_and_failures(capsys, tmp_path):
    assert run(capsys, "iterate", "ex2.7", "--start", "x9")[0] == 2
    assert run(capsys, "iterate", "ex2.7")[0] == 2
    assert run(capsys, "iterate", "ex2.10", "--start", "2")[0] == 2
    assert run(capsys, "iterate", "ex2.9", "--start", "1", "--bound-check")[0] == 2
    swap = {
        "format": "polycontract-problem", "version": 1, "kind": "banach",
        "space": {"type": "finite", "points": ["a", "b"], "metric": "discrete"},
        "map": {"type": "table", "table": {"a": "b", "b": "a"}},
    }
    code, rep = run_machine(capsys, "iterate", write(tmp_path, swap), "--start", "a")
    assert code == 1 and rep["status"] == "cycle-detected"
    code, rep = run_machine(capsys, "iterate", "ex2.10", "--start", "1", "--max-iter", "1")
    assert code == 1 and rep["status"] == "max-iter"


def test_search(capsys):
    code, rep = run_machine(capsys, "search", "ex2.7", "--k", "1", "--mode", "full")
    assert code == 0 and rep["reverify"]["status"] == "pass"
    assert rep["result"]["probes"][0] == {"lambda": "1048575/1048576", "feasible": True}
    code, rep = run_machine(capsys, "search", "ex2.7", "--k", "1", "--mode", "constant")
    assert code == 1 and rep["status"] == "infeasible-below-one"
    code, rep = run_machine(capsys, "search", "ex3.6", "--k", "2")
    assert code == 0 and rep["target"] == "almost" and rep["reverify"]["status"] == "pass"
    assert run(capsys, "search", "ex2.10")[0] == 2
    assert run(capsys, "search", "ex2.7", "--lambda-tol", "2")[0] == 2


@pytest.mark.parametrize("name", sorted(DOCUMENTS))
def test_demo(capsys, name):
    code, rep = run_machine(capsys, "demo", name)
    assert code == 0 and rep["status"] == "pass"
    assert all(c["passed"] for c in rep["checks"])


def test_demo_tables(capsys):
    _, rep = run_machine(capsys, "demo", "ex2.7")
    rows = rep["tables"][0]["rows"]
    assert [(r[1], r[3]) for r in rows] == [("3", "4"), ("2", "3"), ("3", "4"), ("3", "7"), ("2", "3")]
    assert all(r[1] == r[2] and r[3] == r[4] for r in rows)
    _, rep = run_machine(capsys, "demo", "ex3.6")
    rows = rep["tables"][0]["rows"]
    assert [r[0] for r in rows] == ["(x1,x2)", "(x2,x1)", "(x2,x3)", "(x3,x2)"]
    assert all((r[1], r[3]) == ("2", "3") for r in rows)
    _, rep = run_machine(capsys, "demo", "ex2.9")
    names = {c["name"] for c in rep["checks"]}
    assert "grid discretisation is Picard-continuous" in names
    assert any("jump" in t["title"] for t in rep["tables"])
    assert run(capsys, "demo", "ex9.9")[0] == 2


def test_human_format(capsys):
    code, out = run(capsys, "demo", "ex2.7")
    assert code == 0 and "[PASS]" in out and "(x2,x4)" in out
    code, out = run(capsys, "verify", "ex2.7")
    assert "min feasible lambda: 3/4" in out


@pytest.mark.parametrize(
    "argv",
    [
        ("verify", "ex2.7"),
        ("iterate", "ex2.7", "--start", "x2", "--bound-check"),
        ("search", "ex3.6", "--k", "1"),
        ("demo", "ex2.9"),
    ],
)
def test_reports_are_deterministic(capsys, argv):
    first = run(capsys, *argv, "--format", "machine")
    second = run(capsys, *argv, "--format", "machine")
    assert first == second
    rep = json.loads(first[1])
    assert rep["version"] == __version__ and rep["input"]["digest"].startswith("sha256:")


def test_bad_arguments_exit_2(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "search", "ex2.7", "--mode", "partial")[0] == 2
    assert run(capsys, "iterate", "ex2.7", "--start", "x1", "--max-iter", "many")[0] == 2


json_values = st.recursive(
    st.none() | st.booleans() | st.integers(-5, 5) | st.text(max_size=6),
    lambda c: st.lists(c, max_size=4) | st.dictionaries(st.text(max_size=6), c, max_size=4),
    max_leaves=12,
)


@given(json_values, st.sampled_from(["validate", "verify", "search"]))
def test_arbitrary_json_never_crashes(tmp_path_factory, value, command):
    path = tmp_path_factory.mktemp("fuzz") / "doc.json"
    path.write_text(json.dumps(value))
    assert main([command, str(path), "--format", "machine"]) == 2


@given(st.sampled_from(sorted(DOCUMENTS)), st.sampled_from(["space", "map", "family", "certificate"]), json_values)
def test_corrupted_sections_never_crash(tmp_path_factory, name, key, value):
    raw = json.loads(json.dumps(DOCUMENTS[name]))
    raw[key] = value
    path = tmp_path_factory.mktemp("fuzz") / "doc.json"
    path.write_text(json.dumps(raw))
    assert main(["validate", str(path), "--format", "machine"]) in (0, 1, 2)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "polycontract", "verify", "ex3.6"], capture_output=True, text=True)
    assert proc.returncode == 0 and "pass" in proc.stdout


def test_deeply_nested_expression_is_an_input_error(capsys, tmp_path):
    raw = json.loads(json.dumps(DOCUMENTS["ex2.10"]))
    raw["family"]["a"][0] = "(" * 5000 + "x" + ")" * 5000
    code, rep = run_machine(capsys, "verify", write(tmp_path, raw))
    assert code == 2
