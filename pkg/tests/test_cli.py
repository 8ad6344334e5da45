import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from compop import acceptance
from compop.cli import (
    EXIT_BUDGET,
    EXIT_FAILED,
    EXIT_GUARD,
    EXIT_INPUT,
    EXIT_OK,
    main,
    parse_budget,
    parse_poly,
)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_OK, err
    return json.loads(out)


def test_parse_poly_forms():
    assert parse_poly("1:1,3:0.5-0.25j").as_dict() == {1: 1, 3: 0.5 - 0.25j}
    js = '{"terms": [{"n": 2, "re": 1.0, "im": -1.0}]}'
    assert parse_poly(js).as_dict() == {2: 1 - 1j}


@pytest.mark.parametrize("text,sec", [("90", 90), ("90s", 90), ("10m", 600), ("1h", 3600), ("500ms", 0.5)])
def test_parse_budget(text, sec):
    assert parse_budget(text) == pytest.approx(sec)


def test_compose_json(capsys):
    doc = run_json(capsys, "compose", "--symbol", "shift:1", "--poly", "1:1,3:2", "--rows", "10")
    terms = {t["n"]: t["re"] for t in doc["result"]["poly"]["terms"]}
    assert terms == pytest.approx({1: 1.0, 3: 2 / 3})
    assert doc["meta"]["command"] == "compose"
    assert {"versions", "seconds", "truncations", "timestamp", "seed"} <= set(doc["meta"])


def test_approx_csv_header_and_values(capsys):
    code, out, err = run(capsys, "approx", "--symbol", "shift:1", "--trunc", "6", "--format", "csv")
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["n", "value", "provenance"]
    assert [float(r[1]) for r in rows[1:]] == pytest.approx(1 / np.arange(1, 7))
    assert all(r[2] for r in rows[1:])
    assert json.loads(err)["command"] == "approx"


def test_csv_out_writes_metadata_sidecar(tmp_path, capsys):
    out = tmp_path / "eig.csv"
    code, _, _ = run(capsys, "eig", "--symbol", "shift:1", "--trunc", "5", "--format", "csv", "--out", str(out))
    assert code == EXIT_OK
    assert out.read_text().startswith("n,re,im,provenance")
    meta = json.loads((tmp_path / "eig.csv.meta.json").read_text())
    assert meta["truncations"]["N"] == 5


def test_fit_reads_previous_output(tmp_path, capsys):
    spec = tmp_path / "sv.json"
    run(capsys, "approx", "--symbol", "shift:1", "--trunc", "30", "--out", str(spec))
    doc = run_json(capsys, "fit", "--in", str(spec))
    assert doc["result"]["model"] == "power"
    assert doc["result"]["params"]["A"] == pytest.approx(1, abs=1e-6)


def test_gram_and_carleson(capsys):
    pts = "[[1, 0], [1, 100]]"
    doc = run_json(capsys, "carleson", "--points", pts, "--kernel", "halfplane")
    assert doc["result"]["carleson_h2"] == pytest.approx(1.0099995000374968, rel=1e-12)
    doc = run_json(capsys, "gram", "--points", pts, "--kernel", "halfplane")
    assert doc["result"]["lam_min"] + doc["result"]["lam_max"] == pytest.approx(2)


def test_same_seed_same_result(capsys):
    argv = ["lp", "--poly", "1:1,2:0.5,6:-0.3", "--p", "4", "--samples", "3000", "--seed", "9"]
    a = run_json(capsys, *argv)["result"]
    b = run_json(capsys, *argv)["result"]
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert a["provenance"] == "mc"


def test_nevanlinna_and_partialsum(capsys):
    doc = run_json(capsys, "nevanlinna", "--symbol", "shift:1", "--at", "3+1j")
    assert doc["result"]["values"] == [2.0]
    doc = run_json(capsys, "partialsum", "--poly", "1:1,5:1,20:1", "--trunc", "10")
    assert [t["n"] for t in doc["result"]["poly"]["terms"]] == [1, 5]


def test_saksman_reports_kernel_norm(capsys):
    doc = run_json(capsys, "saksman", "--poly", "1:1,5:1,20:1", "--trunc", "10")
    assert doc["result"]["kernel_l1"] == pytest.approx(1.9227535822198936, rel=1e-7)


@pytest.mark.parametrize("argv", [
    ["compose", "--symbol", "shift:1"],
    ["approx", "--symbol", "spiral:1", "--trunc", "5"],
    ["fit", "--in", "/nonexistent/spectrum.csv"],
    ["approx", "--symbol", "shift:1", "--trunc", "5", "--max-entries", "10"],
    ["nosuchcommand"],
])
def test_input_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == EXIT_INPUT


def test_resource_guard_exit(capsys):
    code, _, err = run(capsys, "assemble", "--symbol", "shift:1", "--trunc", "100",
                       "--max-entries", "50", "--ack-resource-guard")
    assert code == EXIT_GUARD
    assert "resource guard" in err


def _fake(passed, seconds=0.0):
    def check():
        import time
        time.sleep(seconds)
        return acceptance.CheckResult("X", "fake", passed, {"v": 1.0}, "v = 1", seconds)
    return check


def test_verify_exit_codes(monkeypatch, capsys):
    monkeypatch.setitem(acceptance.SUITES, "kernels", ["X"])
    monkeypatch.setitem(acceptance.CHECKS, "X", _fake(True))
    code, out, err = run(capsys, "verify", "kernels")
    assert code == EXIT_OK
    assert "[PASS] X" in err
    assert json.loads(out)["result"]["failed"] == []

    monkeypatch.setitem(acceptance.CHECKS, "X", _fake(False))
    code, _, err = run(capsys, "verify", "kernels")
    assert code == EXIT_FAILED
    assert "[FAIL] X" in err

    monkeypatch.setitem(acceptance.SUITES, "kernels", ["X", "X"])
    monkeypatch.setitem(acceptance.CHECKS, "X", _fake(True, 0.05))
    code, out, _ = run(capsys, "verify", "kernels", "--budget", "10ms", "--format", "csv")
    assert code == EXIT_BUDGET
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][:3] == ["id", "name", "status"]
    assert [r[2] for r in rows[1:]] == ["PASS", "SKIP"]


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "compop.cli", "approx", "--symbol", "shift:1", "--trunc", "3"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["result"]["values"] == pytest.approx([1, 0.5, 1 / 3])
