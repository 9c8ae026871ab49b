"""Exact JSON encoding shared by the data files and the CLI reports.

Rationals become ``{"num": "p", "den": "q"}`` with string fields, so no
value ever passes through a float.  Polynomials become
``{"poly": [{"coef": rational, "vars": [[name, exponent], ...]}, ...]}``
in the deterministic term order of :meth:`PolyExpr.sorted_terms`.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .exactmath import Mat, PolyExpr

__all__ = ["encode", "decode", "dumps", "loads"]


def _rational(x: Fraction) -> dict:
    return {"num": str(x.numerator), "den": str(x.denominator)}


def encode(obj: Any) -> Any:
    """Plain JSON structure for reports built from dicts, lists and exact scalars."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return _rational(obj)
    if isinstance(obj, PolyExpr):
        return {
            "poly": [
                {"coef": _rational(c), "vars": [[name, e] for name, e in mono]} for mono, c in obj.sorted_terms()
            ]
        }
    if isinstance(obj, Mat):
        return [[_rational(x) for x in row] for row in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if isinstance(obj, float):
        raise TypeError("floats are not part of the exact report format")
    raise TypeError(f"cannot encode {type(obj).__name__}")


def _hook(d: dict) -> Any:
    if set(d) == {"num", "den"} and isinstance(d["num"], str) and isinstance(d["den"], str):
        return Fraction(int(d["num"]), int(d["den"]))
    if set(d) == {"poly"} and isinstance(d["poly"], list):
        return PolyExpr({tuple((n, e) for n, e in t["vars"]): t["coef"] for t in d["poly"]})
    return d


def decode(obj: Any) -> Any:
    """Inverse of :func:`encode` on an already parsed JSON value."""
    if isinstance(obj, dict):
        return _hook({k: decode(v) for k, v in obj.items()})
    if isinstance(obj, list):
        return [decode(v) for v in obj]
    return obj


def dumps(obj: Any) -> bytes:
    """UTF-8 bytes; key order is the insertion order of the report."""
    return (json.dumps(encode(obj), ensure_ascii=False, indent=2) + "\n").encode("utf-8")


def loads(data) -> Any:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return json.loads(data, object_hook=_hook)
