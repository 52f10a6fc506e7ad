"""Matrix files and report serialisation.

A matrix file is a JSON object ``{"n": int, "entries": [[re, im], ...]}``
with the entries in row-major order.  Reports are written with a small
serializer of our own so that every float carries 17 significant digits
and key order is exactly the insertion order.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import NonFiniteEntryError, NonSquareError, ParseError


def matrix_to_dict(A) -> dict:
    A = np.asarray(A, dtype=complex)
    return {"n": int(A.shape[0]), "entries": [[float(z.real), float(z.imag)] for z in A.ravel()]}


def matrix_from_dict(doc) -> np.ndarray:
    if not isinstance(doc, dict) or "n" not in doc or "entries" not in doc:
        raise ParseError('matrix file must be an object with keys "n" and "entries"')
    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ParseError('"n" must be a positive integer')
    entries = doc["entries"]
    if not isinstance(entries, list):
        raise ParseError('"entries" must be a list of [re, im] pairs')
    if len(entries) != n * n:
        raise NonSquareError(f"expected {n * n} entries for n={n}, got {len(entries)}")
    vals = []
    for e in entries:
        if (not isinstance(e, (list, tuple)) or len(e) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in e)):
            raise ParseError(f"bad entry {e!r}; expected [re, im]")
        if not all(math.isfinite(x) for x in e):
            raise NonFiniteEntryError(f"non-finite entry {e!r}")
        vals.append(complex(e[0], e[1]))
    return np.array(vals, dtype=complex).reshape(n, n)


def read_matrix(path) -> np.ndarray:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    return matrix_from_dict(doc)


def write_matrix(path, A) -> None:
    # json writes floats with repr, which round-trips exactly
    Path(path).write_text(json.dumps(matrix_to_dict(A)) + "\n")


def plain(obj):
    """Convert numpy, complex and enum values into JSON-ready builtins."""
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if hasattr(obj, "to_dict"):
        return plain(obj.to_dict())
    return obj


def _float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def _dump(obj, indent: int, level: int, out: list) -> None:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(k)}: ")
            _dump(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
        elif all(not isinstance(v, (dict, list)) for v in obj):
            out.append("[" + ", ".join(_scalar(v) for v in obj) + "]")
        else:
            out.append("[\n")
            for i, v in enumerate(obj):
                out.append(pad)
                _dump(v, indent, level + 1, out)
                out.append(",\n" if i < len(obj) - 1 else "\n")
            out.append(end + "]")
    else:
        out.append(_scalar(obj))


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return _float(v)
    return json.dumps(str(v))


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON text; floats use 17 significant digits."""
    out: list[str] = []
    _dump(plain(obj), indent, 0, out)
    return "".join(out) + "\n"


def _flatten(obj, prefix: str, rows: list) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(v, f"{prefix}.{k}" if prefix else str(k), rows)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _flatten(v, f"{prefix}.{i}", rows)
    else:
        rows.append((prefix, _scalar(obj).strip('"')))


def to_csv(doc: dict) -> str:
    """Two-column key,value listing of a report with nested keys joined by dots."""
    rows: list = []
    _flatten(plain(doc), "", rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    writer.writerows(rows)
    return buf.getvalue()
