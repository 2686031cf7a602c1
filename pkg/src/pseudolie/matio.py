"""Matrix JSON format and full-precision number output.

A matrix is stored as ``{"n": n, "entries": [[re, im], ...]}`` with ``n*n``
row-major entries. Floats are written with 17 significant digits.
"""

from __future__ import annotations

import json
import math

import numpy as np


class MatrixFormatError(ValueError):
    pass


def format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"cannot serialise non-finite value {x}")
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return f"{x:.17g}"


def dumps(obj, indent: int | None = 2, _level: int = 0) -> str:
    """JSON text with floats at 17 significant digits.

    Complex numbers and numpy scalars/arrays are converted on the way
    (complex as ``[re, im]``).
    """
    pad = "" if indent is None else "\n" + " " * (indent * (_level + 1))
    end = "" if indent is None else "\n" + " " * (indent * _level)
    sep = "," if indent is None else ","
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (np.bool_, bool)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (np.integer, int)):
        return str(int(obj))
    if isinstance(obj, (np.floating, float)):
        return format_float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return f"[{format_float(obj.real)}, {format_float(obj.imag)}]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [f"{pad}{dumps(v, indent, _level + 1)}" for v in obj]
        return "[" + sep.join(items) + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def matrix_to_json(A) -> dict:
    A = np.asarray(A, dtype=complex)
    return {"n": int(A.shape[0]), "entries": [[float(z.real), float(z.imag)] for z in A.ravel()]}


def matrix_from_json(data) -> np.ndarray:
    """Parse the matrix format, reporting the row/column of a bad entry."""
    if not isinstance(data, dict) or "n" not in data or "entries" not in data:
        raise MatrixFormatError('expected an object with keys "n" and "entries"')
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise MatrixFormatError(f'"n" must be a positive integer, got {n!r}')
    entries = data["entries"]
    if not isinstance(entries, list) or len(entries) != n * n:
        got = len(entries) if isinstance(entries, list) else type(entries).__name__
        raise MatrixFormatError(f"expected {n * n} entries, got {got}")
    A = np.empty((n, n), dtype=complex)
    for k, e in enumerate(entries):
        row, col = divmod(k, n)
        ok = (isinstance(e, list) and len(e) == 2
              and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in e))
        if not ok or not all(math.isfinite(v) for v in e):
            raise MatrixFormatError(f"bad entry at row {row}, col {col}: {e!r}")
        A[row, col] = complex(e[0], e[1])
    return A


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MatrixFormatError(f"{path}: invalid JSON ({exc})") from exc
    return matrix_from_json(data)


def save_matrix(path, A):
    with open(path, "w") as fh:
        fh.write(dumps(matrix_to_json(A), indent=None) + "\n")


def complex_list_from_json(data) -> np.ndarray:
    """A list of ``[re, im]`` pairs (or plain reals)."""
    if not isinstance(data, list):
        raise MatrixFormatError("expected a list of [re, im] pairs")
    out = []
    for k, e in enumerate(data):
        if isinstance(e, (int, float)) and not isinstance(e, bool):
            out.append(complex(e))
        elif isinstance(e, list) and len(e) == 2 and all(isinstance(v, (int, float)) for v in e):
            out.append(complex(e[0], e[1]))
        else:
            raise MatrixFormatError(f"bad value at index {k}: {e!r}")
    return np.array(out, dtype=complex)
