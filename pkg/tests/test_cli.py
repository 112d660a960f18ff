import json

import pytest

from anyonchain.cli import build_parser, main
from anyonchain.report import SCHEMA_KEYS, SPECTRUM_COLUMNS, dumps


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_spinon_writes_report(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "spinon", "--n", "8", "--tol", "1e-9", "--out", str(tmp_path))
    assert code == 0
    text = (tmp_path / "verify-spinon.json").read_text()
    doc = json.loads(text)
    assert tuple(doc) == SCHEMA_KEYS
    assert doc["pass"] is True
    assert len(doc["checks"]) == 10
    assert all(c["name"].startswith("scattering_spinon_N8") for c in doc["checks"])
    assert dumps(json.loads(text)) == text
    assert "PASS" in out


def test_no_files_without_out(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(capsys, "count", "--n", "6")[0] == 0
    assert list(tmp_path.iterdir()) == []


def test_quantize(capsys):
    code, out, _ = run(capsys, "quantize", "--theta", "1.5707963", "--length", "6.2831853", "--k", "3")
    assert code == 0
    assert "{0.5, 1.5, 2.5}" in out


def test_quantize_exact(tmp_path, capsys):
    code, _, _ = run(capsys, "quantize", "--theta-over-pi", "1/2", "--kind", "2d", "--out", str(tmp_path))
    assert code == 0
    doc = json.loads((tmp_path / "quantize.json").read_text())
    assert doc["checks"][0]["details"]["exact"] == ["3/2", "7/2", "11/2"]
    assert doc["config"]["theta_over_pi"] == "1/2"


def test_count(capsys):
    code, out, _ = run(capsys, "count", "--n", "24")
    assert code == 0
    assert out.splitlines()[0] == "16777216"


def test_spectrum_csv(tmp_path, capsys):
    code, _, _ = run(capsys, "spectrum", "--n", "6", "--species", "holon", "--format", "csv", "--out", str(tmp_path))
    assert code == 0
    rows = (tmp_path / "spectrum.csv").read_text().splitlines()
    assert rows[0].split(",") == SPECTRUM_COLUMNS
    # C(6,2) * C(4,2) configurations
    assert len(rows) == 1 + 90
    assert rows[1].startswith("2,2,0,")
    assert (tmp_path / "spectrum.json").exists()


def test_checks_csv(tmp_path, capsys):
    assert run(capsys, "gram", "--n", "5", "--format", "csv", "--out", str(tmp_path))[0] == 0
    assert (tmp_path / "gram.csv").read_text().startswith("name,pass,value,tolerance\n")


def test_capacity_exit_code(capsys):
    code, _, err = run(capsys, "spectrum", "--n", "10", "--species", "ground", "--dense-limit", "100")
    assert code == 3
    assert "dense limit 100" in err


def test_usage_exit_codes(capsys):
    assert run(capsys, "gram", "--n", "4")[0] == 2
    assert run(capsys, "verify", "holon", "--n", "7")[0] == 2
    assert run(capsys, "quantize", "--theta", "4")[0] == 2
    assert run(capsys, "spectrum", "--n", "4", "--holes", "9")[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["count", "--n", "-3"])
    assert info.value.code == 2
    with pytest.raises(SystemExit):
        main(["spectrum", "--n", "4", "--tol", "0"])


def test_failure_names_check(capsys):
    # an absurd tolerance makes the residual checks fail
    code, _, err = run(capsys, "verify", "spinon", "--n", "6", "--tol", "1e-30")
    assert code == 1
    assert "FAIL scattering_spinon_N6_m0_n0" in err
    assert "value=" in err


def test_iterative_spectrum(capsys):
    code, out, _ = run(capsys, "spectrum", "--n", "8", "--species", "ground", "--mode", "iterative", "--k", "3")
    assert code == 0
    assert "E[0] = -0.308425137534" in out


def test_parser_defaults():
    args = build_parser().parse_args(["spacing", "--n", "4"])
    assert (args.tol, args.dense_limit, args.seed, args.out, args.format) == (1e-9, 6000, 42, None, "json")


def test_quick_suite_threads(tmp_path, capsys):
    code, out, _ = run(capsys, "suite", "--quick", "--threads", "2", "--out", str(tmp_path))
    assert code == 0
    doc = json.loads((tmp_path / "suite.json").read_text())
    assert doc["pass"] is True
    names = [c["name"] for c in doc["checks"]]
    assert len(names) == len(set(names))
