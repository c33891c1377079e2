import json
import os
import re
import subprocess
import sys
from pathlib import Path

import pytest

from excpot.cli import main

GOLDEN = Path(__file__).parent / "golden"
REGEN = os.environ.get("EXCPOT_REGEN_GOLDEN") == "1"

CASES = {
    "verify_7_2": ["verify", "--k", "7", "--l", "2"],
    "verify_4_2": ["verify", "--k", "4", "--l", "2"],
    "verify_6_2": ["verify", "--k", "6", "--l", "2"],
    "search_3_1": ["search", "--exceptional", "3", "1", "--momentum-max", "2"],
    "search_harmonic": ["search", "--potential", "q1^2+q2^2", "--momentum-max", "1"],
    "darboux_cubic": ["darboux", "--potential", "q1^3+q2^3"],
    "darboux_7_2": ["darboux", "--exceptional", "7", "2"],
    "galois_l2": ["galois", "--l", "2", "--integrate"],
    "transform_kinetic": ["transform", "1/2*(p1^2+p2^2)"],
    "simulate_7_2": ["simulate", "--exceptional", "7", "2", "--t-end", "0.01", "--dt", "1e-3", "--samples", "2", "--dd"],
}


def _portable(text):
    """Reports echo the kernel backend; numbers are identical across backends."""
    return re.sub(r'"backend": "\w+"', '"backend": "*"', text)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name, capsys):
    code, out, err = run(CASES[name], capsys)
    assert code == 0, err
    path = GOLDEN / f"{name}.json"
    if REGEN:
        path.write_text(out)
    assert _portable(out) == _portable(path.read_text())
    report = json.loads(out)
    assert report["schema"] == 1 and report["command"] == CASES[name] and report["exit_code"] == 0
    assert "timings" not in report
    assert err.strip()


def test_verify_7_2_content(capsys):
    _, out, _ = run(["verify", "--k", "7", "--l", "2"], capsys)
    report = json.loads(out)
    assert "item6-coefficient" in {f["id"] for f in report["discrepancy_flags"]}


def test_verify_6_2_empty(capsys):
    code, out, err = run(["verify", "--k", "6", "--l", "2"], capsys)
    assert code == 0 and "no catalog integral" in out


def test_search_7_2(capsys):
    code, out, _ = run(["search", "--exceptional", "7", "2", "--momentum-max", "4"], capsys)
    payload = json.loads(out)["payload"]
    found = [(r["m"], r["W"]) for r in payload["findings"]]
    assert code == 0 and found == [(4, 30)]


def test_search_6_2_none(capsys):
    code, out, _ = run(["search", "--exceptional", "6", "2", "--momentum-max", "4", "--all-reports"], capsys)
    payload = json.loads(out)["payload"]
    assert code == 0 and all(not r["novel_candidates"] for r in payload["reports"])


def test_determinism(capsys):
    argv = ["simulate", "--exceptional", "7", "2", "--t-end", "0.02", "--dt", "1e-3", "--seed", "4"]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert a == b


def test_seed_changes_payload(capsys):
    base = ["simulate", "--exceptional", "7", "2", "--t-end", "0.02", "--dt", "1e-3"]
    _, a, _ = run(base + ["--seed", "1"], capsys)
    _, b, _ = run(base + ["--seed", "2"], capsys)
    assert json.loads(a)["payload"] != json.loads(b)["payload"]


def test_timings_flag(capsys):
    _, out, _ = run(["darboux", "--potential", "q1^3", "--timings"], capsys)
    assert "timings" in json.loads(out)


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["verify", "--k", "7"],
        ["darboux"],
        ["darboux", "--potential", "q1^2 + q2"],
        ["darboux", "--potential", "q1 +* q2"],
        ["search", "--potential", "q1*p1"],
        ["galois", "--l", "2", "--c", "i"],
        ["simulate", "--exceptional", "3", "1", "--dt", "-1"],
        ["verify", "--k", "3", "--l", "5"],
    ],
)
def test_usage_errors(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 1 and out == "" and "excpot" in err


def test_parse_error_reports_offset(capsys):
    code, _, err = run(["transform", "q1 + $"], capsys)
    assert code == 1 and "offset 5" in err


def test_blow_up_exit_code(capsys):
    code, out, _ = run(["simulate", "--potential=-q1^3", "--z0", "1", "0", "1", "0", "--t-end", "10", "--dt", "0.01"], capsys)
    assert code == 3
    assert json.loads(out)["exit_code"] == 3


def test_out_and_env_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("EXCPOT_OUTPUT_DIR", str(tmp_path))
    code, out, _ = run(["transform", "q1^2+q2^2", "--out", "sub/t.json"], capsys)
    assert code == 0 and out == ""
    report = json.loads((tmp_path / "sub" / "t.json").read_text())
    assert report["payload"]["output"] == "x1*x2"


def test_transform_reports_beta(capsys):
    _, out, _ = run(["transform", "(q2-i*q1)*(q2+i*q1)^4"], capsys)
    payload = json.loads(out)["payload"]
    assert payload["output"] == "(-i)*x1*x2^4"
    assert payload["exceptional"] == {"alpha": "1", "beta": "-i", "k": 5, "l": 1}


def test_transform_inverse(capsys):
    _, out, _ = run(["transform", "--direction", "bihom-to-natural", "2*y1*y2"], capsys)
    assert json.loads(out)["payload"]["output"] == "1/2*p1^2 + 1/2*p2^2"


def test_console_module_entry():
    proc = subprocess.run([sys.executable, "-m", "excpot", "transform", "q1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["payload"]["output"] == "1/2*x1 + 1/2*x2"
