"""Readers for the simulator's file interfaces.

Schemas (produced by the `morsedeco` CLI):

- Wigner grid CSV: one `# time=.. delta=.. T=..` comment line, then a row
  holding the momentum axis (leading cell empty), then one row per position
  value: x, W(x, p_0), W(x, p_1), ...
- Sweep CSV: header `delta,left,right,central` (coupling sweep) or
  `T,central` (temperature sweep), one numeric row per sweep point.
- Fit manifest: JSON object with keys `model` ("exponential" | "bose") and
  `params` ({A, c} or {a, b, T_c}).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = ["SchemaError", "WignerData", "SweepData", "FitData",
           "read_wigner_csv", "read_sweep_csv", "read_fit_manifest"]


class SchemaError(ValueError):
    """An input file does not match the expected CSV/JSON schema."""


@dataclass(frozen=True)
class WignerData:
    x_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray       # shape (len(x_axis), len(p_axis))
    meta: dict


@dataclass(frozen=True)
class SweepData:
    kind: str                # "delta" | "temperature"
    axis: np.ndarray
    series: dict             # name -> np.ndarray


@dataclass(frozen=True)
class FitData:
    model: str               # "exponential" | "bose"
    params: dict


def read_wigner_csv(path) -> WignerData:
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    if len(lines) < 3 or not lines[0].startswith("#"):
        raise SchemaError(f"{path}: missing '# time=.. delta=.. T=..' header")
    meta = {}
    try:
        for item in lines[0].lstrip("# ").split():
            key, val = item.split("=")
            meta[key] = float(val)
        p_axis = np.array([float(v) for v in lines[1].split(",")[1:]])
        rows = [ln.split(",") for ln in lines[2:] if ln]
        x_axis = np.array([float(r[0]) for r in rows])
        values = np.array([[float(v) for v in r[1:]] for r in rows])
    except ValueError as exc:
        raise SchemaError(f"{path}: malformed Wigner grid: {exc}") from exc
    if values.shape != (len(x_axis), len(p_axis)) or len(p_axis) < 2:
        raise SchemaError(f"{path}: grid shape {values.shape} does not match "
                          f"axes ({len(x_axis)}, {len(p_axis)})")
    return WignerData(x_axis=x_axis, p_axis=p_axis, values=values, meta=meta)


_SWEEP_HEADERS = {
    "delta,left,right,central": ("delta", ("left", "right", "central")),
    "T,central": ("temperature", ("central",)),
}


def read_sweep_csv(path) -> SweepData:
    try:
        with open(path) as fh:
            lines = [ln for ln in fh.read().splitlines() if ln]
    except OSError as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    if not lines or lines[0] not in _SWEEP_HEADERS:
        raise SchemaError(f"{path}: expected header "
                          f"{' or '.join(map(repr, _SWEEP_HEADERS))}")
    kind, names = _SWEEP_HEADERS[lines[0]]
    try:
        table = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    except ValueError as exc:
        raise SchemaError(f"{path}: non-numeric sweep row: {exc}") from exc
    if table.ndim != 2 or table.shape[1] != len(names) + 1 or len(table) < 2:
        raise SchemaError(f"{path}: expected >= 2 rows of {len(names) + 1} columns")
    return SweepData(kind=kind, axis=table[:, 0],
                     series={n: table[:, i + 1] for i, n in enumerate(names)})


_FIT_PARAMS = {"exponential": ("A", "c"), "bose": ("a", "b", "T_c")}


def read_fit_manifest(path) -> FitData:
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    model = payload.get("model")
    if model not in _FIT_PARAMS:
        raise SchemaError(f"{path}: unknown fit model {model!r}")
    params = payload.get("params", {})
    missing = [k for k in _FIT_PARAMS[model] if k not in params]
    if missing:
        raise SchemaError(f"{path}: fit manifest missing params {missing}")
    return FitData(model=model,
                   params={k: float(params[k]) for k in _FIT_PARAMS[model]})
