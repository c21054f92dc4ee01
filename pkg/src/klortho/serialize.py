"""Machine-readable output: JSON at 17 significant digits, RFC 4180 CSV, coefficient files."""
import csv
import io
import json
import math
from decimal import Decimal, InvalidOperation
from pathlib import Path

import numpy as np

from .errors import KLError
from .families import CoefficientTable

SCHEMA_VERSION = 1
SCHEMA_DIR = Path(__file__).parent / "schemas"


class SchemaError(KLError, ValueError):
    """A coefficient file (or other input document) violates its schema."""


def fmt(v):
    """Shortest faithful text for a float: 17 significant digits, JSON-safe."""
    v = float(v)
    if not math.isfinite(v):
        return "null"
    return format(v, ".17g")


def _encode(obj, out):
    if obj is None or isinstance(obj, (bool, np.bool_)):
        out.append(json.dumps(None if obj is None else bool(obj)))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(fmt(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(k)) + ": ")
            _encode(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _encode(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json(obj):
    """Deterministic JSON text; floats at 17 significant digits, non-finite as null."""
    out = []
    _encode(obj, out)
    return "".join(out)


def gram_report_dict(rep):
    d = {
        "schema_version": SCHEMA_VERSION,
        "kind": "gram_report",
        "case_id": rep.case_id,
        "params": dict(rep.params),
        "route": rep.route,
        "N": rep.N,
        "matrix": np.asarray(rep.matrix).tolist(),
        "expected_diag": np.asarray(rep.expected_diag).tolist(),
        "max_offdiag_rel": rep.max_offdiag_rel,
        "max_diag_rel_err": rep.max_diag_rel_err,
        "tol_off": rep.tol_off,
        "tol_diag": rep.tol_diag,
        "pass": rep.passed,
        "errors": list(rep.errors),
    }
    if rep.wall_time is not None:
        d["wall_time"] = rep.wall_time
    return d


def dorth_report_dict(rep):
    d = {
        "schema_version": SCHEMA_VERSION,
        "kind": "dorth_report",
        "case_id": rep.case_id,
        "params": dict(rep.params),
        "n": rep.n,
        "m": list(rep.ms),
        "x_residuals": list(rep.x_residuals),
        "tau_residuals": list(rep.tau_residuals),
        "tol_x": rep.tol_x,
        "tol_tau": rep.tol_tau,
        "pass": rep.passed,
        "errors": list(rep.errors),
    }
    if rep.wall_time is not None:
        d["wall_time"] = rep.wall_time
    return d


def report_dict(rep):
    return dorth_report_dict(rep) if hasattr(rep, "tau_residuals") else gram_report_dict(rep)


def rows_to_csv(rows, header=None):
    """RFC 4180 text (CRLF line ends, dot decimals) from rows of numbers or strings."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    if header:
        w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def matrix_to_csv(matrix):
    return rows_to_csv(np.asarray(matrix, dtype=float).tolist())


def parse_decimal(text, what="value"):
    """A float from an exact decimal string (or a JSON number), rejecting non-finite input."""
    if isinstance(text, bool):
        raise SchemaError(f"{what}: expected a number, got a boolean")
    if isinstance(text, (int, float)):
        v = float(text)
    elif isinstance(text, str):
        try:
            d = Decimal(text.strip())
        except InvalidOperation:
            raise SchemaError(f"{what}: {text!r} is not a decimal number") from None
        if not d.is_finite():
            raise SchemaError(f"{what}: {text!r} is not finite")
        v = float(d)
    else:
        raise SchemaError(f"{what}: expected a number, got {type(text).__name__}")
    if not math.isfinite(v):
        raise SchemaError(f"{what}: {text!r} is out of double range")
    return v


def coefficients_from_obj(doc):
    if not isinstance(doc, dict):
        raise SchemaError("coefficient file: top level must be an object")
    extra = set(doc) - {"family", "rows", "schema_version", "params"}
    if extra:
        raise SchemaError(f"coefficient file: unknown key {sorted(extra)[0]!r}")
    fam = doc.get("family")
    if not isinstance(fam, str) or not fam:
        raise SchemaError("coefficient file: 'family' must be a non-empty string")
    rows = doc.get("rows")
    if not isinstance(rows, list) or not rows:
        raise SchemaError("coefficient file: 'rows' must be a non-empty array")
    out = []
    for n, row in enumerate(rows):
        if not isinstance(row, list):
            raise SchemaError(f"coefficient file: row {n} is not an array")
        if len(row) != n + 1:
            raise SchemaError(f"coefficient file: row {n} has {len(row)} entries, expected {n + 1}")
        out.append(tuple(parse_decimal(v, f"row {n}, column {k}") for k, v in enumerate(row)))
    return CoefficientTable(tuple(out), fam)


def load_coefficients(path):
    """Read a coefficient table ``{"family": ..., "rows": [[...], ...]}``."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read coefficient file {str(path)!r}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"coefficient file is not JSON (line {exc.lineno}, column {exc.colno})") from None
    return coefficients_from_obj(doc)


def dump_coefficients(table):
    # repr is the shortest string that reads back to the same double
    rows = "[" + ", ".join("[" + ", ".join(repr(float(v)) for v in r) + "]" for r in table.rows) + "]"
    return "{" + f'"family": {json.dumps(table.family)}, "rows": {rows}' + "}"
