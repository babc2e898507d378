import io
import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from varextropy.cli import EXIT_CALIBRATION, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, dispatch


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = dispatch(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def schema(name):
    text = resources.files("varextropy").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def run_json(name, *argv):
    code, out, err = run(*argv, "--json")
    assert code == EXIT_OK, err
    doc = json.loads(out)
    jsonschema.validate(doc, schema(name))
    return doc


@pytest.fixture
def sample_file(tmp_path):
    path = tmp_path / "sample.txt"
    path.write_text("1\n2\n3\n7\n")
    return path


@pytest.fixture
def unit_file(tmp_path):
    path = tmp_path / "unit.csv"
    path.write_text("id,x\n" + "".join(f"{i},{(i + 0.5) / 20}\n" for i in range(20)))
    return path


def test_exit_codes_are_distinct():
    assert (EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_CALIBRATION) == (0, 2, 3, 4)


# -- closed-form and scan --------------------------------------------------------
def test_closed_form_iv():
    code, out, _ = run("closed-form", "--dist", "exp:rate=1", "--t1", "0", "--t2", "3", "--measure", "iv")
    assert code == 0 and float(out) == pytest.approx(1 / 48, abs=1e-15)


def test_closed_form_json_with_bounds():
    doc = run_json("closed-form", "closed-form", "--dist", "exp:rate=1", "--t1", "0", "--t2", "1", "--bounds")
    assert doc["method"] == "closed"
    assert doc["bounds"]["lower"] <= doc["iv"] <= doc["bounds"]["upper"]
    doc = run_json("closed-form", "closed-form", "--dist", "example5", "--t1", "0.5", "--t2", "1.5")
    assert doc["method"] == "quadrature"


def test_closed_form_errors():
    assert run("closed-form", "--dist", "exp:rate=1", "--t1", "3", "--t2", "1")[0] == EXIT_DOMAIN
    assert run("closed-form", "--dist", "bogus", "--t1", "0", "--t2", "1")[0] == EXIT_USAGE
    assert run("closed-form", "--dist", "exp:rate=1", "--t1", "x", "--t2", "1")[0] == EXIT_USAGE
    code, _, err = run("closed-form", "--t1", "0", "--t2", "1")
    assert code == EXIT_USAGE and err.startswith("error:") and err.count("\n") == 1


def test_scan_csv_and_json():
    code, out, _ = run("scan", "--dist", "exp:rate=2", "--fix", "t1=0", "--range", "1:3:5")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "t,value" and len(lines) == 6
    assert all(float(line.split(",")[1]) == pytest.approx(4 / 48, abs=1e-12) for line in lines[1:])
    doc = run_json("scan", "scan", "--dist", "example5", "--fix", "t2=1.5", "--range", "0:1:4")
    assert len(doc["rows"]) == 4
    assert run("scan", "--dist", "exp:rate=1", "--fix", "t3=0", "--range", "1:3:5")[0] == EXIT_USAGE
    assert run("scan", "--dist", "exp:rate=1", "--fix", "t1=0", "--range", "1:3")[0] == EXIT_USAGE


# -- estimate -----------------------------------------------------------------------
def test_estimate(sample_file):
    code, out, _ = run("estimate", "--estimator", "spacing", "--t1", "0", "--t2", "8", "--m", "2", "--input", str(sample_file))
    assert code == 0 and float(out) == pytest.approx(0.0009, abs=1e-12)
    doc = run_json("estimate", "estimate", "--estimator", "kde-plugin", "--t1", "0", "--t2", "8", "--input", str(sample_file))
    assert doc["n"] == 4 and doc["h"] > 0


def test_estimate_csv_column(unit_file):
    doc = run_json("estimate", "estimate", "--estimator", "spacing", "--t1", "0", "--t2", "1",
                   "--input", str(unit_file), "--column", "x")
    assert doc["n"] == 20 and doc["m"] == 4


def test_estimate_errors(tmp_path, sample_file):
    empty = tmp_path / "empty.txt"
    empty.write_text("")
    code, _, err = run("estimate", "--estimator", "spacing", "--t1", "0", "--t2", "1", "--input", str(empty))
    assert code == EXIT_USAGE and "no observations parsed" in err
    code, _, err = run("estimate", "--estimator", "spacing", "--t1", "5", "--t2", "6", "--input", str(sample_file))
    assert code == EXIT_DOMAIN
    ties = tmp_path / "ties.txt"
    ties.write_text("1\n2\n2\n5\n")
    assert run("estimate", "--estimator", "spacing", "--t1", "0", "--t2", "6", "--m", "1", "--input", str(ties))[0] == EXIT_DOMAIN
    code, out, _ = run("estimate", "--estimator", "spacing", "--t1", "0", "--t2", "6", "--m", "1",
                       "--input", str(ties), "--jitter", "1e-6", "--seed", "3")
    assert code == 0 and out
    assert run("estimate", "--estimator", "kde", "--t1", "0", "--t2", "6", "--input", str(ties))[0] == EXIT_USAGE
    assert run("estimate", "--estimator", "spacing", "--t1", "0", "--t2", "6", "--input", str(tmp_path / "missing"))[0] == EXIT_USAGE


# -- Monte Carlo commands --------------------------------------------------------------
SIM = ("simulate", "--dist", "exp:rate=1", "--t1", "0", "--t2", "3", "--sizes", "10,20", "--reps", "20", "--seed", "42")


def test_simulate_csv_deterministic(monkeypatch):
    code, first, _ = run(*SIM)
    assert code == 0 and first.splitlines()[0] == "n,estimator,bias,mse,failures"
    assert run(*SIM)[1] == first
    assert run(*SIM, "--workers", "2")[1] == first
    monkeypatch.setenv("IV_WORKERS", "2")
    assert run(*SIM)[1] == first
    assert run(*SIM[:-1], "43")[1] != first


def test_simulate_json():
    doc = run_json("simulate", *SIM)
    assert doc["seed"] == 42 and len(doc["rows"]) == 6


def test_simulate_errors(monkeypatch):
    assert run(*SIM, "--estimators", "bogus")[0] == EXIT_USAGE
    assert run(*SIM[:-1], "-1")[0] == EXIT_USAGE
    monkeypatch.setenv("IV_WORKERS", "zero")
    assert run(*SIM)[0] == EXIT_DOMAIN


def test_critvals_and_test(tmp_path, unit_file):
    cal = tmp_path / "cal.csv"
    code, out, _ = run("critvals", "--stat", "GD,KS", "--n", "20", "--reps", "1000", "--seed", "1", "--output", str(cal))
    assert code == 0 and out.splitlines()[0] == "stat,n,alpha,critical"
    assert cal.read_text() == out
    run_json("critvals", "critvals", "--stat", "KS", "--n", "20", "--reps", "1000", "--seed", "1")
    doc = run_json("test", "test", "--stat", "GD", "--input", str(unit_file), "--column", "x", "--calibration", str(cal))
    assert doc["reject"] is False
    code, out, _ = run("test", "--stat", "KS", "--input", str(unit_file), "--column", "1", "--calibration", str(cal))
    assert code == 0 and out.endswith("accept\n")
    assert run("test", "--stat", "GB", "--input", str(unit_file), "--column", "x", "--calibration", str(cal))[0] == EXIT_CALIBRATION
    assert run("test", "--stat", "GD", "--input", str(unit_file), "--column", "x")[0] == EXIT_CALIBRATION
    assert run("critvals", "--n", "20", "--reps", "10")[0] == EXIT_DOMAIN


def test_power(tmp_path):
    argv = ("power", "--alt", "B3,U", "--stat", "KS", "--n", "10", "--reps", "200", "--calibration-reps", "1000", "--seed", "5")
    code, out, _ = run(*argv)
    assert code == 0 and out.splitlines()[0] == "stat,alt,n,alpha,critical,power,failures"
    assert run(*argv)[1] == out
    doc = run_json("power", *argv)
    assert {r["alt"] for r in doc["rows"]} == {"B3", "U"}
    assert run("power", "--alt", "Q2", "--n", "10", "--reps", "10")[0] == EXIT_USAGE
    cal = tmp_path / "cal.csv"
    cal.write_text("stat,n,alpha,critical\nKS,20,0.05,0.3\n")
    assert run("power", "--alt", "B3", "--stat", "KS", "--n", "10", "--reps", "10", "--calibration", str(cal))[0] == EXIT_CALIBRATION


# -- analyze ------------------------------------------------------------------------------
def test_analyze(tmp_path):
    doc = run_json("analyze", "analyze", "--embedded", "cancer")
    assert doc["n"] == 128 and len(doc["windows"]) == 3
    code, out, _ = run("analyze", "--windows", "1,7;2,10")
    assert code == 0 and len(out.splitlines()) == 3
    data = tmp_path / "d.txt"
    data.write_text("\n".join(str(0.5 * i) for i in range(1, 40)))
    doc = run_json("analyze", "analyze", "--input", str(data), "--windows", "1,5", "--lambda", "0.2")
    assert doc["windows"][0]["model_iv_closed"] == pytest.approx(0.04 / 48)
    assert run("analyze", "--windows", "1;2")[0] == EXIT_USAGE
    assert run("analyze", "--windows", "7,1")[0] == EXIT_DOMAIN


def test_every_subcommand_accepts_seed(sample_file, unit_file, tmp_path):
    cal = tmp_path / "cal.csv"
    cal.write_text("stat,n,alpha,critical\nGD,20,0.05,0.05\n")
    commands = [
        ("closed-form", "--dist", "exp:rate=1", "--t1", "0", "--t2", "3"),
        ("scan", "--dist", "exp:rate=1", "--fix", "t1=0", "--range", "1:3:3"),
        ("estimate", "--estimator", "spacing", "--t1", "0", "--t2", "8", "--input", str(sample_file)),
        ("test", "--input", str(unit_file), "--column", "x", "--calibration", str(cal)),
        ("analyze",),
    ]
    for argv in commands:
        first = run(*argv, "--seed", "7")
        assert first[0] == 0, first[2]
        assert run(*argv, "--seed", "7") == first


def test_no_output_on_failure():
    code, out, err = run("simulate", "--dist", "exp:rate=1", "--t1", "0", "--t2", "3", "--sizes", "1", "--reps", "2")
    assert code == EXIT_DOMAIN and out == "" and err


def test_console_script():
    proc = subprocess.run(
        [sys.executable, "-m", "varextropy.cli", "closed-form", "--dist", "exp:rate=1", "--t1", "0", "--t2", "3", "--measure", "iv"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and float(proc.stdout) == pytest.approx(1 / 48)
    proc = subprocess.run([sys.executable, "-m", "varextropy.cli", "closed-form"], capture_output=True, text=True)
    assert proc.returncode == 2 and proc.stdout == ""
