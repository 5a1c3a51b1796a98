"""Canonical JSON/CSV encoding.  Exact rationals are written as "num/den" strings."""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import json
from fractions import Fraction

import mpmath
import numpy as np

SCHEMA_VERSION = 1


def to_jsonable(obj):
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float):
        return repr(obj)
    if isinstance(obj, mpmath.mpf):
        return mpmath.nstr(obj, 30)
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return repr(float(obj))
    if isinstance(obj, complex):
        return [repr(obj.real), repr(obj.imag)]
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(payload, kind: str) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "kind": kind, "data": to_jsonable(payload)}
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def rows_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([to_jsonable(v) if not isinstance(v, str) else v for v in row])
    return buf.getvalue()
