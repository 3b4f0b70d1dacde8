"""Deterministic JSON and CSV output with 17 significant digits."""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .linalg import ComplexMatrix, Party, Shape


def fmt(x) -> str:
    """Format a real number so that parsing it back is bit-identical."""
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return "%.17g" % x


def dumps(obj, indent: int = 0, _level: int = 0) -> str:
    """JSON encoder writing every float with 17 significant digits."""
    pad = "\n" + " " * (indent * (_level + 1)) if indent else ""
    end = "\n" + " " * (indent * _level) if indent else ""
    sep = "," + pad if indent else ","
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [json.dumps(str(k)) + ": " + dumps(v, indent, _level + 1) for k, v in obj.items()]
        return "{" + pad + sep.join(items) + end + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        flat = all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj)
        if flat or not indent:
            return "[" + ",".join(dumps(v) for v in obj) + "]"
        return "[" + pad + sep.join(dumps(v, indent, _level + 1) for v in obj) + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def complex_pairs(a: np.ndarray) -> list:
    a = np.asarray(a, dtype=complex)
    # adding 0.0 drops the sign of negative zeros, which JSON would read back as ints
    return [[float(z.real) + 0.0, float(z.imag) + 0.0] for z in a.ravel()]


def from_pairs(pairs, rows: int, cols: int) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    if arr.shape != (rows * cols, 2):
        raise ValueError(f"expected {rows * cols} [re, im] pairs, got array of shape {arr.shape}")
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(rows, cols)


def shape_to_json(shape: Shape) -> list:
    out = []
    for p in shape.parties:
        item = {"key": p.key, "shield": p.shield}
        if p.label is not None:
            item["label"] = p.label
        out.append(item)
    return out


def shape_from_json(items) -> Shape:
    return Shape(Party(int(p.get("key", 1)), int(p.get("shield", 1)), p.get("label")) for p in items)


def matrix_to_json(m: ComplexMatrix) -> dict:
    return {"dim": m.dim, "parties": shape_to_json(m.shape), "data": complex_pairs(m.data)}


def matrix_from_json(obj: dict) -> ComplexMatrix:
    dim = int(obj["dim"])
    return ComplexMatrix(from_pairs(obj["data"], dim, dim), shape_from_json(obj["parties"]))


def write_matrix(m: ComplexMatrix, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(matrix_to_json(m)))
        fh.write("\n")


def read_matrix(path) -> ComplexMatrix:
    with open(path) as fh:
        return matrix_from_json(json.load(fh))


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()
