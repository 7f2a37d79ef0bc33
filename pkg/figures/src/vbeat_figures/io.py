"""Readers for the simulator's CSV/JSON output schemas."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np


class SchemaError(ValueError):
    pass


def _read_two_column(path: Path, header: str) -> tuple[np.ndarray, np.ndarray]:
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline().strip()
        if first != header:
            raise SchemaError(f"{path}: expected header '{header}', got '{first}'")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.size == 0:
        raise SchemaError(f"{path}: no data rows")
    return data[:, 0], data[:, 1]


def read_trace(path) -> tuple[np.ndarray, np.ndarray]:
    """Trace CSV: t_ps,intensity."""
    return _read_two_column(Path(path), "t_ps,intensity")


def read_spectrum(path) -> tuple[np.ndarray, np.ndarray]:
    """Spectrum CSV: axis,value (axis unit lives in the metadata sidecar)."""
    return _read_two_column(Path(path), "axis,value")


def read_summary(path) -> dict:
    """Summary CSV: param,value_GHz,stderr_GHz,converged."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["param", "value_GHz", "stderr_GHz", "converged"]:
            raise SchemaError(f"{path}: unexpected summary header {header}")
        rows = [row for row in reader if row]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return {
        "param": np.array([float(r[0]) for r in rows]),
        "value_GHz": np.array([float(r[1]) for r in rows]),
        "stderr_GHz": np.array([float(r[2]) for r in rows]),
        "converged": np.array([r[3].strip().lower() == "true" for r in rows]),
    }


_FIT_REQUIRED = ("model", "t1_ps", "offset", "baseline", "components")


def read_fit(path) -> dict:
    """Fit JSON: envelope parameters plus per-component (freq, amp, phase)."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("error"):
        return payload
    for key in _FIT_REQUIRED:
        if key not in payload:
            raise SchemaError(f"{path}: fit JSON missing '{key}'")
    for comp in payload["components"]:
        for key in ("frequency_rad_per_ps", "amplitude", "phase_rad"):
            if key not in comp:
                raise SchemaError(f"{path}: component missing '{key}'")
    return payload
