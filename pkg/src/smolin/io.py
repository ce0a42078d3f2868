"""File formats: density-matrix JSON, count tables (CSV or JSON), bundled data."""

from __future__ import annotations

import csv
import json
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .linalg import validate_density_matrix
from .tomography import CountTable

BUNDLED = {
    "table1": "table1_witness_p049.csv",
    "table3": "table3_unlocking.csv",
}


def density_matrix_to_dict(rho: np.ndarray) -> dict:
    rho = np.asarray(rho, dtype=complex)
    n = rho.shape[0].bit_length() - 1
    return {"n_qubits": n, "re": rho.real.tolist(), "im": rho.imag.tolist()}


def density_matrix_from_dict(d: dict, tol: float = 1e-8) -> np.ndarray:
    try:
        n = int(d["n_qubits"])
        rho = np.array(d["re"], dtype=float) + 1j * np.array(d["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed density-matrix object: {exc}") from exc
    if rho.shape != (2**n, 2**n):
        raise ValidationError(f"matrix shape {rho.shape} does not match n_qubits={n}")
    return validate_density_matrix(rho, tol=tol)


def write_density_matrix(path, rho: np.ndarray) -> None:
    Path(path).write_text(json.dumps(density_matrix_to_dict(rho), indent=1) + "\n")


def read_density_matrix(path) -> np.ndarray:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from exc
    return density_matrix_from_dict(data)


def _number(text: str):
    v = float(text)
    return int(v) if v.is_integer() else v


def read_counts_csv(path) -> list[CountTable]:
    """Read ``setting,outcome,count`` rows, grouping rows by setting in file order."""
    groups: dict[str, dict] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["setting", "outcome", "count"]:
            raise ValidationError(f"{path}: header must be 'setting,outcome,count'")
        for lineno, row in enumerate(reader, start=2):
            try:
                setting, outcome, count = row["setting"].strip(), row["outcome"].strip(), _number(row["count"])
            except (AttributeError, ValueError) as exc:
                raise ValidationError(f"{path}:{lineno}: bad row {row}") from exc
            bucket = groups.setdefault(setting, {})
            if outcome in bucket:
                raise ValidationError(f"{path}:{lineno}: duplicate outcome {outcome} for setting {setting}")
            bucket[outcome] = count
    if not groups:
        raise ValidationError(f"{path}: no count rows")
    return [CountTable(s, c) for s, c in groups.items()]


def write_counts_csv(path, tables: Sequence[CountTable]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["setting", "outcome", "count"])
        for t in tables:
            for o, c in t.counts.items():
                w.writerow([t.setting, o, c])


def counts_to_dict(tables: Sequence[CountTable], **metadata) -> dict:
    return {
        "metadata": metadata,
        "tables": [
            {"setting": t.setting, "duration": t.duration, "counts": dict(t.counts)} for t in tables
        ],
    }


def counts_from_dict(d: dict) -> list[CountTable]:
    try:
        meta = d.get("metadata", {}) or {}
        tables = []
        for entry in d["tables"]:
            duration = entry.get("duration", meta.get("duration"))
            tables.append(CountTable(entry["setting"], dict(entry["counts"]), duration))
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValidationError(f"malformed count-table JSON: {exc}") from exc
    return tables


def read_counts(path) -> list[CountTable]:
    """Count tables from a ``.csv`` or ``.json`` file, or a bundled name (``table1``, ``table3``)."""
    if str(path) in BUNDLED:
        return bundled_counts(str(path))
    p = Path(path)
    if not p.exists():
        raise ValidationError(f"{p}: no such file")
    if p.suffix.lower() == ".json":
        try:
            return counts_from_dict(json.loads(p.read_text()))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{p}: not valid JSON ({exc})") from exc
    return read_counts_csv(p)


def write_counts(path, tables: Sequence[CountTable], fmt: str = "csv", **metadata) -> None:
    if fmt == "csv":
        write_counts_csv(path, tables)
    elif fmt == "json":
        Path(path).write_text(json.dumps(counts_to_dict(tables, **metadata), indent=1) + "\n")
    else:
        raise ValidationError(f"unknown format {fmt!r}")


def bundled_path(name: str):
    if name not in BUNDLED:
        raise ValidationError(f"unknown bundled dataset {name!r}; choose from {sorted(BUNDLED)}")
    return resources.files("smolin.data").joinpath(BUNDLED[name])


def bundled_counts(name: str) -> list[CountTable]:
    with resources.as_file(bundled_path(name)) as p:
        return read_counts_csv(p)
