import json
import subprocess
import sys

import pytest

from tensorquot import cli
from tensorquot.criterion import CriterionReport

SEVEN = "&".join(["d(v)"] * 7)


def run(argv):
    report, code = cli.run(argv)
    return json.loads(cli.dumps(report)), code


def test_analyze_examples():
    rep, code = run(["analyze", "cyclic(3)"])
    assert code == 0 and rep["order"] == 3
    assert [c["order"] for c in rep["components"]] == [3]
    rep, _ = run(["analyze", "symmetric(3)"])
    assert rep["order"] == 6 and rep["is_reflection_group"]
    assert [c["order"] for c in rep["components"]] == [2]
    assert rep["molien"] == [1, 1, 2, 3, 4, 5]
    assert rep["chart"]["reflection_divisor"][0]["multiplicity"] == 2
    rep, _ = run(["analyze", "trivial(2)"])
    assert rep["components"] == [] and rep["is_reflection_group"]
    rep, _ = run(["analyze", '{"conductor": 3, "dim": 2, "generators": [[["z", 0], [0, "z"]]]}'])
    assert not rep["is_reflection_group"] and "chart" not in rep


def test_check_examples():
    rep, code = run(["check", "cyclic(3)", f"v^-3 * {SEVEN}"])
    assert code == 0 and rep["divisor_criterion_holds"] and rep["direct_regularity_holds"]
    assert rep["per_component"][0]["rho"] == 5 and rep["seed"] == 0
    rep, code = run(["check", "cyclic(3)", f"v^-5 * {SEVEN}"])
    assert code == 0 and not rep["divisor_criterion_holds"] and rep["agree"]
    rep, code = run(["check", "trivial(1)", "d(v)"])
    assert code == 0 and rep["divisor_criterion_holds"]


def test_check_on_group_without_reflections():
    G = '{"conductor": 3, "dim": 2, "generators": [[["z", 0], [0, "z"]]]}'
    rep, code = run(["check", G, "x1^2 * d(x1)", "--side", "x"])
    assert code == 0 and rep["agree"]
    rep, code = run(["check", G, "d(x1)"])
    assert code == 1 and rep["error"]["type"] == "UnsupportedQuotientError"


def test_pullback_pushforward_divisor_commands():
    rep, _ = run(["pullback", "cyclic(2)", "d(v)"])
    assert rep["pullback"] == "2*u * d(u)"
    rep, _ = run(["pushforward", "cyclic(2)", "u * D(u)"])
    assert rep["pushforward"] == "2*v * D(v)"
    rep, _ = run(["divisor", "symmetric(2)", "1/(f1^2 - 4*f2) * d(f1)"])
    assert rep["entries"] == [{"component": "f1^2 - 4*f2", "multiplicity": -1}]
    assert not rep["effective"]
    rep, _ = run(["divisor", "symmetric(2)", "(x1 - x2)^2 * d(x1)", "--side", "x"])
    assert rep["entries"] == [{"component": "x1 - x2", "multiplicity": 2}]


def test_bdivisor_command():
    rep, code = run(["bdivisor", "cyclic(3)", f"v^-3 * {SEVEN}", "--B", "3[v]"])
    assert code == 0 and rep["entries"] == [{"component": "v", "multiplicity": 5}]
    rep, _ = run(["bdivisor", "cyclic(3)", f"v^-3 * {SEVEN}"])
    assert rep["entries"][0]["multiplicity"] == 5
    rep, _ = run(["bdivisor", "symmetric(2)", "d(f1)", "--adapted-index", "1"])
    assert rep["entries"][0]["multiplicity"] == 0
    rep, code = run(["bdivisor", "cyclic(3)", "d(v)", "--B", "0[v]"])
    assert code == 1 and rep["error"]["type"] == "InvalidDivisorError"


def test_solomon_and_lift_commands():
    rep, code = run(["solomon", "cyclic(2)", "1/v * d(v)"])
    assert code == 0 and rep["agree"] and not rep["regular"]
    rep, code = run(["solomon", "cyclic(2)", "u * d(u)", "--side", "x"])
    assert code == 0 and rep["pushforward_regular"]
    base = ["lift-verify", "cyclic(2)", "--phi", "3*u", "--phi-inverse", "u/3"]
    rep, code = run(base + ["--psi", "9*v", "--psi-inverse", "v/9"])
    assert code == 0 and rep["commutes"]
    rep, code = run(base + ["--psi", "9*v + 1", "--psi-inverse", "(v - 1)/9"])
    assert code == 0 and not rep["commutes"]


def test_fuzz_command():
    rep, code = run(["fuzz", "symmetric(2)", "--kind", "all", "--cases", "4", "--seed", "7"])
    assert code == 0 and not rep["falsification"] and rep["seed"] == 7
    assert set(rep["suites"]) == {"theorem", "roundtrip", "additivity", "charts", "solomon", "skewpush"}


def test_parse_errors_report_positions():
    rep, code = run(["check", "cyclic(3)", "v^-3 * d(v) +"])
    assert code == 1
    err = rep["error"]
    assert err["type"] == "ParseError" and err["line"] == 1 and err["column"] == 14


@pytest.mark.parametrize("argv", [
    ["check", "dihedral(4)", "d(v)"],
    ["pushforward", "cyclic(3)", "d(u)"],
    ["check", "cyclic(3)", "0 * d(v)"],
    ["nonsense"],
    [],
    ["check", "cyclic(3)", "@/nonexistent/file"],
])
def test_rejections_exit_with_one(argv):
    rep, code = run(argv)
    assert code == 1 and "error" in rep


def test_falsification_exits_with_two(monkeypatch):
    def broken(chart, tau, extra=()):
        return CriterionReport(True, False, [], True, False, chart.f_names)
    monkeypatch.setattr(cli, "check_main_theorem", broken)
    rep, code = run(["check", "cyclic(2)", "d(v)"])
    assert code == 2 and rep["falsification"]


def test_file_inputs_and_out(tmp_path):
    t = tmp_path / "tau.txt"
    t.write_text(f"v^-3 *\n {SEVEN}\n")
    out = tmp_path / "r.json"
    code = cli.main(["check", "cyclic(3)", f"@{t}", "--out", str(out)])
    assert code == 0
    assert json.loads(out.read_text())["per_component"][0]["rho"] == 5


def test_custom_chart_spec(tmp_path):
    spec = {"group": {"builtin": "symmetric(2)"}, "invariants": ["x1 + x2", "x1^2 + x2^2"]}
    rep, code = run(["pullback", json.dumps(spec), "d(f2)"])
    assert code == 0 and rep["pullback"] == "2*x1 * d(x1) + 2*x2 * d(x2)"


def test_suite_file(tmp_path):
    jobs = [
        ["check", "cyclic(3)", f"v^-3 * {SEVEN}"],
        {"command": "bdivisor", "group": "cyclic(3)", "tensor": f"v^-3 * {SEVEN}", "B": "3[v]"},
        {"command": "check", "group": "cyclic(3)", "tensor": "v +"},
    ]
    path = tmp_path / "jobs.json"
    path.write_text(json.dumps(jobs))
    rep, code = run(["--suite", str(path)])
    assert code == 1
    assert [j["job"] for j in rep["jobs"]] == [0, 1, 2]
    assert rep["jobs"][1]["entries"][0]["multiplicity"] == 5
    assert "error" in rep["jobs"][2]


def test_output_is_byte_identical_across_processes():
    argv = [sys.executable, "-m", "tensorquot", "fuzz", "wreath(2,1,2)", "--kind", "theorem",
            "--cases", "5", "--seed", "3"]
    a = subprocess.run(argv, capture_output=True)
    b = subprocess.run(argv, capture_output=True)
    assert a.returncode == 0 and a.stdout == b.stdout and a.stdout


def test_console_entry_and_summary():
    p = subprocess.run([sys.executable, "-m", "tensorquot", "check", "cyclic(3)",
                        f"v^-5 * {SEVEN}", "--summary"], capture_output=True, text=True)
    assert p.returncode == 0
    assert json.loads(p.stdout)["per_component"][0]["rho"] == -1
    assert p.stderr.strip() == "check: ok"
