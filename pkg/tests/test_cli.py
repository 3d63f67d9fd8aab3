import json
import os
import subprocess
import sys
from pathlib import Path

from g2lab import cli

DATA = Path(__file__).parent / "data"


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_analyze_valid_instance(capsys):
    code, rep = run(["analyze", "--curve", str(DATA / "curve_p41.json"), "--ell", "3", "--trials", "5"], capsys)
    assert code == cli.EXIT_OK
    assert rep["verdicts"]["diagonalizable_iff_splits"] == "verified"
    assert rep["in_hypothesis"] is True
    assert "timings" not in rep


def test_analyze_singular_curve(capsys):
    code, rep = run(["analyze", "--curve", str(DATA / "curve_singular.json"), "--ell", "3"], capsys)
    assert code == cli.EXIT_INPUT
    assert rep["type"] == "SingularCurve"


def test_analyze_ell_not_dividing(capsys):
    code, rep = run(["analyze", "--curve", str(DATA / "curve_p41.json"), "--ell", "7"], capsys)
    assert code == cli.EXIT_INPUT
    assert "does not divide the group order" in rep["message"]


def test_analyze_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, rep = run(["analyze", "--curve", str(bad), "--ell", "3"], capsys)
    assert code == cli.EXIT_INPUT
    code, rep = run(["analyze", "--curve", str(tmp_path / "missing.json"), "--ell", "3"], capsys)
    assert code == cli.EXIT_INPUT


def test_analyze_budget_from_environment():
    env = dict(os.environ, G2LAB_KAPPA_BITS="20")
    proc = subprocess.run([sys.executable, "-m", "g2lab.cli", "analyze", "--curve", str(DATA / "curve_p41.json"),
                           "--ell", "3"], capture_output=True, text=True, env=env)
    assert proc.returncode == cli.EXIT_BUDGET
    assert json.loads(proc.stdout)["type"] == "KappaTooLarge"


def test_analyze_is_deterministic(capsys):
    args = ["analyze", "--curve", str(DATA / "curve_p41.json"), "--ell", "3", "--trials", "3", "--seed", "5"]
    cli.main(args)
    a = capsys.readouterr().out
    cli.main(args)
    b = capsys.readouterr().out
    assert a == b


def test_timings_go_to_stderr(capsys):
    cli.main(["analyze", "--curve", str(DATA / "curve_p41.json"), "--ell", "3", "--trials", "2", "--timings"])
    cap = capsys.readouterr()
    assert "analyze:" in cap.err
    assert "analyze:" not in cap.out


def test_cm_check_bicyclic(capsys):
    code, rep = run(["cm-check", "--spec", str(DATA / "cm_bicyclic.json")], capsys)
    assert code == cli.EXIT_OK
    assert rep["primitive"] is False
    assert rep["rationality"].startswith("out_of_scope")


def test_cm_check_nonresidue(capsys):
    code, rep = run(["cm-check", "--spec", str(DATA / "cm_nonresidue.json")], capsys)
    assert code == cli.EXIT_OK
    assert rep["predicted_kappa_equals_k"] is True
    assert rep["cross_validation"][0]["status"] == "confirmed_synthetic"
    assert rep["cross_validation"][0]["label"] == "logical-level only"


def test_cm_check_with_corpus(capsys):
    code, rep = run(["cm-check", "--spec", str(DATA / "cm_matched.json"), "--corpus",
                     str(DATA / "corpus_p71.json")], capsys)
    assert code == cli.EXIT_OK
    statuses = sorted(r["status"] for r in rep["cross_validation"])
    assert statuses == ["confirmed", "hypothesis_not_met"]
    assert all(r["label"] == "matched by P only" for r in rep["cross_validation"])


def test_cm_check_malformed(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"D": 2}')
    code, _ = run(["cm-check", "--spec", str(bad)], capsys)
    assert code == cli.EXIT_INPUT
    bad.write_text("[")
    code, _ = run(["cm-check", "--spec", str(bad)], capsys)
    assert code == cli.EXIT_INPUT
    bad.write_text('{"D": 2, "a": 2, "b": 0, "c": [3, 0, 1, 0], "q": 13, "ell": 3}')
    code, rep = run(["cm-check", "--spec", str(bad)], capsys)
    assert code == cli.EXIT_INPUT
    assert rep["type"] == "NotWeilNumber"


def test_scan_empty_range(tmp_path, capsys):
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"p": [], "widen_p": [], "min_in_hypothesis": 0}))
    code, res = run(["scan", "--manifest", str(m)], capsys)
    assert code == cli.EXIT_OK
    assert res["summary"]["candidates"] == 0
    assert res["instances"] == []


def test_scan_quota_unmet(tmp_path, capsys):
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"p": [31], "widen_p": [], "ells": [3], "curves_per_p": 2, "cm_curves_per_p": 2,
                             "trials": 2, "min_in_hypothesis": 50}))
    code, res = run(["scan", "--manifest", str(m), "--summary-only"], capsys)
    assert code == cli.EXIT_QUOTA
    assert res["summary"]["quota"]["met"] is False
    assert "instances" not in res


def test_scan_bad_manifest(tmp_path, capsys):
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"primes": [31]}))
    code, rep = run(["scan", "--manifest", str(m)], capsys)
    assert code == cli.EXIT_INPUT
    m.write_text(json.dumps({"strategy": "spiral"}))
    code, rep = run(["scan", "--manifest", str(m)], capsys)
    assert code == cli.EXIT_INPUT
    m.write_text(json.dumps({"budgets": {"nonsense": 1}}))
    code, rep = run(["scan", "--manifest", str(m)], capsys)
    assert code == cli.EXIT_INPUT


def test_selftest_other_seed(capsys):
    code, rep = run(["selftest", "--seed", "7"], capsys)
    assert code == cli.EXIT_OK
    assert rep["ok"] is True
    assert rep["seed"] == 7


def test_console_script_is_installed():
    proc = subprocess.run(["g2lab", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for cmd in ("analyze", "scan", "cm-check", "selftest"):
        assert cmd in proc.stdout
