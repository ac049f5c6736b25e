import hashlib
import json
import os
import subprocess
import sys

import pytest

from qsum.cli import main
from qsum.report_schema import validate_report

EULER = "q=2; delta=1; m=1; d=0; eq: t*S^1(X) + S^0(X) = 1\n"
EX2 = "q=2; delta=1; m=2; d=1; eq: S^1(X) + t*S^2(X) + t*S^1 Dz1^1(X) = 1/(1-z1)\n"
BAD = "q=2; delta=1; m=1; d=0; eq: t*S^0(X) + t*S^1(X) = 1\n"


@pytest.fixture
def euler_file(tmp_path):
    p = tmp_path / "euler.qde"
    p.write_text(EULER)
    return str(p)


@pytest.fixture
def bad_file(tmp_path):
    p = tmp_path / "bad.qde"
    p.write_text(BAD)
    return str(p)


def run_cli(args):
    return main(list(args))


def test_report_end_to_end(tmp_path, euler_file):
    out = tmp_path / "report.json"
    code = run_cli(["report", euler_file, "--lambda", "1,0", "--orders", "40",
                    "--mmax", "40", "--epsilon", "0.3", "--N", "12",
                    "--json", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert validate_report(doc) == []
    assert all(v["status"] == "pass" for k, v in doc["verdicts"].items())
    assert doc["polygon"]["m0"] == 0


def test_report_exit_code_singular(tmp_path, euler_file):
    code = run_cli(["report", euler_file, "--lambda=-1,0", "--json", os.devnull])
    assert code == 3


def test_check_exit_code_condition(tmp_path, bad_file):
    code = run_cli(["check", bad_file, "--json", os.devnull])
    assert code == 2


def test_parse_error_exit_code(tmp_path):
    p = tmp_path / "broken.qde"
    p.write_text("q=2; delta=1; m=1; d=0; eq: S^1(X = 1\n")
    assert run_cli(["check", str(p)]) == 5


def test_polygon_csv_and_json(tmp_path, euler_file):
    csv_path = tmp_path / "poly.csv"
    json_path = tmp_path / "poly.json"
    assert run_cli(["polygon", euler_file, "--emit-csv", str(csv_path),
                    "--json", str(json_path)]) == 0
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "j,alpha,ord_t,on_boundary,interior"
    doc = json.loads(json_path.read_text())
    assert doc["vertices"] == [[0, 0], [1, 1]]
    assert doc["slopes"] == [0.0, 1.0, "inf"]


def test_directions_json(tmp_path):
    p = tmp_path / "ex2.qde"
    p.write_text(EX2)
    out = tmp_path / "dir.json"
    assert run_cli(["directions", str(p), "--json", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["roots"] == [{"re": -2.0, "im": 0.0}]
    assert doc["rays"] == [pytest.approx(3.141592653589793)]


def test_solve_artifacts(tmp_path, euler_file):
    out = tmp_path / "solve.json"
    csv_path = tmp_path / "solve.csv"
    assert run_cli(["solve", euler_file, "--orders", "12",
                    "--json", str(out), "--emit-csv", str(csv_path)]) == 0
    doc = json.loads(out.read_text())
    assert doc["A"] == 1.0 and doc["h"] == 1.0
    assert csv_path.read_text().splitlines()[0] == "n,log10_norm,g_n"


def test_square_emits_standard_schema(tmp_path, euler_file):
    out = tmp_path / "sq.json"
    assert run_cli(["square", euler_file, "--json", str(out)]) == 0
    from qsum.equation import from_json
    sq = from_json(out.read_text())
    assert sq.q == pytest.approx(2.0 ** 0.25)
    assert {t.j for t in sq.terms} == {0, 2}


def test_verify_csv(tmp_path, euler_file):
    csv_path = tmp_path / "verify.csv"
    code = run_cli(["verify", euler_file, "--lambda", "1,0", "--orders", "30",
                    "--mmax", "30", "--epsilon", "0.3", "--N", "8",
                    "--emit-csv", str(csv_path), "--json", os.devnull])
    assert code == 0
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "N,max_E_N,bound,rho_N"
    assert len(lines) == 10


def test_report_determinism(tmp_path, euler_file):
    docs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        assert run_cli(["report", euler_file, "--lambda", "1,0", "--orders", "25",
                        "--mmax", "25", "--N", "8", "--json", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert validate_report(doc) == []
        del doc["timings"]  # quarantined; everything else must hash identically
        docs.append(hashlib.sha256(
            json.dumps(doc, sort_keys=True).encode()).hexdigest())
    assert docs[0] == docs[1]


def test_config_file_defaults(tmp_path, euler_file):
    cfg = tmp_path / "qsum.toml"
    cfg.write_text("orders = 10\nmmax = 12\nN = 6\n")
    out = tmp_path / "rep.json"
    code = run_cli(["--config", str(cfg), "report", euler_file,
                    "--lambda", "1,0", "--json", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    # flag absent: config wins over the built-in 40
    assert doc["equation"]["Kt"] == 11
    # flag present: flag wins over config
    out2 = tmp_path / "rep2.json"
    assert run_cli(["--config", str(cfg), "report", euler_file, "--lambda", "1,0",
                    "--orders", "15", "--json", str(out2)]) == 0
    assert json.loads(out2.read_text())["equation"]["Kt"] == 16


def test_console_entry_point(euler_file, tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "qsum.cli", "check", euler_file, "--json", os.devnull],
        capture_output=True, text=True)
    assert proc.returncode == 0


def test_resum_value(tmp_path, euler_file):
    out = tmp_path / "w.json"
    assert run_cli(["resum", euler_file, "--lambda", "1,0", "--t", "0.1,0",
                    "--json", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["W"]["re"] == pytest.approx(0.9150287008940956, rel=1e-9)


def test_grid_too_short_exit_code(tmp_path, euler_file):
    # |t| ~ 0.1 samples need the kernel sum to reach m ~ 25; mmax=4 cannot
    code = run_cli(["report", euler_file, "--lambda", "1,0", "--orders", "20",
                    "--mmax", "4", "--N", "6", "--json", os.devnull])
    assert code == 4


def test_jobs_flag_deterministic(tmp_path, euler_file):
    outs = []
    for jobs in ("1", "4"):
        out = tmp_path / ("j%s.json" % jobs)
        assert run_cli(["verify", euler_file, "--lambda", "1,0", "--orders", "25",
                        "--mmax", "25", "--N", "8", "--jobs", jobs,
                        "--json", str(out)]) == 0
        outs.append(out.read_text())
    assert outs[0] == outs[1]
