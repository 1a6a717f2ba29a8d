"""On-disk formats: POVM/state JSON and the CSV emitted by the phase commands.

Complex numbers are stored as two-element arrays [re, im]; matrices are
row-major lists of rows.  Parsers reject ragged or non-square input with a
FormatError naming the offending location.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import DiscretePovm, DensityState, ToleranceConfig, DEFAULT_TOL
from .errors import FormatError

__all__ = [
    "encode_matrix",
    "decode_matrix",
    "encode_vector",
    "povm_to_dict",
    "povm_from_dict",
    "load_povm",
    "save_povm",
    "state_from_dict",
    "load_state",
    "save_state",
    "write_csv_rows",
    "fmt17",
]


def fmt17(x: float) -> str:
    """17 significant digits: lossless round-trip of a double."""
    return format(float(x), ".17g")


def encode_matrix(matrix) -> list:
    a = np.asarray(matrix, dtype=np.complex128)
    return [[[float(v.real), float(v.imag)] for v in row] for row in a]


def encode_vector(vector) -> list:
    v = np.asarray(vector, dtype=np.complex128).ravel()
    return [[float(x.real), float(x.imag)] for x in v]


def _decode_entry(entry, where: str) -> complex:
    if (
        not isinstance(entry, (list, tuple))
        or len(entry) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)
    ):
        raise FormatError(f"{where}: complex entries must be [re, im] numbers, got {entry!r}")
    return complex(entry[0], entry[1])


def decode_matrix(obj, where: str = "matrix", square: bool = True) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise FormatError(f"{where}: expected a non-empty list of rows")
    width = None
    rows = []
    for i, row in enumerate(obj):
        if not isinstance(row, list) or not row:
            raise FormatError(f"{where}: row {i} is not a non-empty list")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise FormatError(f"{where}: row {i} has {len(row)} entries, expected {width} (ragged)")
        rows.append([_decode_entry(e, f"{where}[{i}][{j}]") for j, e in enumerate(row)])
    a = np.array(rows, dtype=np.complex128)
    if square and a.shape[0] != a.shape[1]:
        raise FormatError(f"{where}: matrix must be square, got shape {a.shape}")
    return a


def povm_to_dict(povm: DiscretePovm) -> dict:
    out = {"dim": povm.dim, "effects": [encode_matrix(e) for e in povm.effects]}
    if povm.labels is not None:
        out["labels"] = list(povm.labels)
    return out


def povm_from_dict(obj: dict, cfg: ToleranceConfig = DEFAULT_TOL) -> DiscretePovm:
    if not isinstance(obj, dict):
        raise FormatError("POVM file must hold a JSON object")
    if "effects" not in obj:
        raise FormatError('POVM file is missing the "effects" key')
    effects = obj["effects"]
    if not isinstance(effects, list) or not effects:
        raise FormatError('"effects" must be a non-empty list of matrices')
    mats = [decode_matrix(e, f"effects[{i}]") for i, e in enumerate(effects)]
    if "dim" in obj:
        dim = obj["dim"]
        if not isinstance(dim, int) or any(m.shape[0] != dim for m in mats):
            raise FormatError('"dim" does not match the effect matrices')
    labels = obj.get("labels")
    if labels is not None and (
        not isinstance(labels, list) or len(labels) != len(mats)
    ):
        raise FormatError('"labels" must list one label per effect')
    return DiscretePovm.from_effects(mats, labels, cfg)


def load_json(path) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    return json.loads(text)


def load_povm(path, cfg: ToleranceConfig = DEFAULT_TOL) -> DiscretePovm:
    return povm_from_dict(load_json(path), cfg)


def save_povm(povm: DiscretePovm, path, extra: dict | None = None) -> None:
    payload = povm_to_dict(povm)
    if extra:
        payload.update(extra)
    Path(path).write_text(json.dumps(payload) + "\n", encoding="utf-8")


def state_from_dict(obj: dict, cfg: ToleranceConfig = DEFAULT_TOL) -> DensityState:
    if not isinstance(obj, dict) or "rho" not in obj:
        raise FormatError('state file must hold a JSON object with a "rho" matrix')
    rho = decode_matrix(obj["rho"], "rho")
    if "dim" in obj and obj["dim"] != rho.shape[0]:
        raise FormatError('"dim" does not match the "rho" matrix')
    return DensityState.from_matrix(rho, cfg)


def load_state(path, cfg: ToleranceConfig = DEFAULT_TOL) -> DensityState:
    return state_from_dict(load_json(path), cfg)


def save_state(state: DensityState, path) -> None:
    payload = {"dim": state.dim, "rho": encode_matrix(state.matrix)}
    Path(path).write_text(json.dumps(payload) + "\n", encoding="utf-8")


def write_csv_rows(stream, rows, header: str = "re_z,im_z,value_re,value_im") -> None:
    """Write (z, value) records with 17-significant-digit decimals."""
    stream.write(header + "\n")
    for z, value in rows:
        z = complex(z)
        value = complex(value)
        stream.write(
            f"{fmt17(z.real)},{fmt17(z.imag)},{fmt17(value.real)},{fmt17(value.imag)}\n"
        )
