"""Tagged JSON encoding for the value types that appear in reports."""

from __future__ import annotations

from typing import Any

from .cartan import DiffForm, MultiVector
from .hochschild import MultiDiffOp
from .kernel import ArtinRing, Poly, format_rational, parse_rational

_TYPES = {"MultiVector": MultiVector, "DiffForm": DiffForm, "MultiDiffOp": MultiDiffOp, "Poly": Poly}


def encode(obj: Any) -> Any:
    """Encode a value as JSON; library objects carry a type tag and their ring."""
    for name, cls in _TYPES.items():
        if isinstance(obj, cls):
            return {"type": name, "ring": obj.ring.to_json(), "value": obj.to_json()}
    if isinstance(obj, (list, tuple)):
        return [encode(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    if hasattr(obj, "numerator") and hasattr(obj, "denominator"):
        return {"type": "Rational", "value": format_rational(obj)}
    raise TypeError(f"cannot encode {type(obj).__name__}")


def decode(data: Any) -> Any:
    """Inverse of :func:`encode`."""
    if isinstance(data, list):
        return [decode(x) for x in data]
    if isinstance(data, dict):
        kind = data.get("type")
        if kind in _TYPES and "value" in data:
            ring = ArtinRing.from_json(data["ring"])
            return _TYPES[kind].from_json(data["value"], ring)
        if kind == "Rational":
            return parse_rational(data["value"])
        return {k: decode(v) for k, v in data.items()}
    return data
