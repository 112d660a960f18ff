"""Check records, verification reports and their JSON/CSV serialisation."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

SCHEMA_KEYS = ("tool_version", "command", "config", "checks", "pass", "elapsed_seconds")


@dataclass
class CheckRecord:
    name: str
    passed: bool
    value: float | int | None
    tolerance: float | None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": bool(self.passed),
            "value": _jsonable(self.value),
            "tolerance": _jsonable(self.tolerance),
            "details": _jsonable(self.details),
        }


@dataclass
class VerificationReport:
    """Pass/fail record of a group of checks on one model."""

    model: dict
    checks: list[CheckRecord] = field(default_factory=list)
    elapsed_seconds: float = 0.0

    def add(self, name, passed, value=None, tolerance=None, **details) -> CheckRecord:
        if any(c.name == name for c in self.checks):
            raise ValueError(f"duplicate check name {name!r}")
        if isinstance(value, float) and not math.isfinite(value):
            details.setdefault("non_finite_value", repr(value))
            value = None
            passed = False
        record = CheckRecord(name, bool(passed), value, tolerance, details)
        self.checks.append(record)
        return record

    def extend(self, other: VerificationReport, prefix: str = "") -> None:
        for c in other.checks:
            self.add(prefix + c.name, c.passed, c.value, c.tolerance, **c.details)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckRecord:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self) -> list[CheckRecord]:
        return [c for c in self.checks if not c.passed]

    def max_value(self) -> float:
        vals = [c.value for c in self.checks if isinstance(c.value, (int, float))]
        return max(vals) if vals else 0.0


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return [_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if obj is None or isinstance(obj, (bool, str, int)):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, complex):
        return [_jsonable(obj.real), _jsonable(obj.imag)]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    return str(obj)


def build_document(tool_version, command, config, reports, elapsed_seconds) -> dict:
    checks = []
    seen = set()
    for report in reports:
        for c in report.checks:
            if c.name in seen:
                raise ValueError(f"check {c.name!r} appears twice")
            seen.add(c.name)
            checks.append(c.to_dict())
    return {
        "tool_version": tool_version,
        "command": command,
        "config": _jsonable(config),
        "checks": checks,
        "pass": all(c["pass"] for c in checks),
        "elapsed_seconds": float(elapsed_seconds),
    }


def dumps(document: dict) -> str:
    return json.dumps(document, indent=2, sort_keys=False, allow_nan=False) + "\n"


def atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def checks_csv(document: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["name", "pass", "value", "tolerance"])
    for c in document["checks"]:
        writer.writerow([c["name"], c["pass"], c["value"], c["tolerance"]])
    return buf.getvalue()


SPECTRUM_COLUMNS = ["sector_Q", "sector_Mup", "index", "energy", "momentum_K"]


def spectrum_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SPECTRUM_COLUMNS)
    for row in rows:
        writer.writerow([_csv_cell(x) for x in row])
    return buf.getvalue()


def _csv_cell(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return x
