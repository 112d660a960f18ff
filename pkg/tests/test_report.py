import json
import math
from fractions import Fraction

import numpy as np
import pytest

from anyonchain.report import (
    SCHEMA_KEYS,
    SPECTRUM_COLUMNS,
    VerificationReport,
    atomic_write,
    build_document,
    checks_csv,
    dumps,
    spectrum_csv,
)


def sample_report():
    r = VerificationReport({"N": 4})
    r.add("a", True, 1e-13, 1e-12, arr=np.array([1.0, 2.0]), frac=Fraction(1, 2), z=1 + 2j)
    r.add("b", False, 0.5, 1e-9)
    return r


def test_add_and_lookup():
    r = sample_report()
    assert not r.passed
    assert [c.name for c in r.failures()] == ["b"]
    assert r["a"].value == 1e-13
    assert r.max_value() == 0.5
    with pytest.raises(ValueError):
        r.add("a", True)
    with pytest.raises(KeyError):
        r["missing"]


def test_non_finite_value_fails():
    r = VerificationReport({})
    rec = r.add("x", True, math.nan, 1.0)
    assert not rec.passed and rec.value is None


def test_extend_prefixes():
    r = VerificationReport({})
    r.extend(sample_report(), prefix="p_")
    assert [c.name for c in r.checks] == ["p_a", "p_b"]


def test_document_schema_and_round_trip():
    doc = build_document("0.1.0", "verify", {"n": 4, "theta": Fraction(1, 2)}, [sample_report()], 0.25)
    assert tuple(doc) == SCHEMA_KEYS
    assert set(doc["checks"][0]) == {"name", "pass", "value", "tolerance", "details"}
    assert doc["pass"] is False
    assert doc["checks"][0]["details"] == {"arr": [1.0, 2.0], "frac": "1/2", "z": [1.0, 2.0]}
    text = dumps(doc)
    assert dumps(json.loads(text)) == text


def test_duplicate_names_across_reports():
    with pytest.raises(ValueError):
        build_document("0", "x", {}, [sample_report(), sample_report()], 0.0)


def test_atomic_write(tmp_path):
    target = tmp_path / "sub" / "out.json"
    atomic_write(target, "one\n")
    atomic_write(target, "two\n")
    assert target.read_text() == "two\n"
    assert [p.name for p in target.parent.iterdir()] == ["out.json"]


def test_csv_tables():
    doc = build_document("0", "x", {}, [sample_report()], 0.0)
    lines = checks_csv(doc).splitlines()
    assert lines[0] == "name,pass,value,tolerance"
    assert lines[2] == "b,False,0.5,1e-09"
    table = spectrum_csv([(0, 2, 0, -0.5, 0.0)]).splitlines()
    assert table[0].split(",") == SPECTRUM_COLUMNS
    assert table[1] == "0,2,0,-0.5,0.0"
