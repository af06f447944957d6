"""Canonical JSON used for everything we persist or put on the wire.

Determinism down to the byte matters here: replay checks, mirroring
involution and cross-run dataset diffs all compare serialized form. Python's
json module is close but not pinned enough (it prints shortest-repr floats,
which is fine, but dict ordering and float quantization policy must be
explicit), so this module owns the rules:

- dict keys are emitted in insertion order; builders construct payloads in
  schema order, and decoded documents re-serialize in document order, so
  decode -> encode is byte-stable;
- floats are quantized to 9 significant digits ("%.9g") at publish/record
  time and printed with repr() afterwards (repr of a quantized value
  round-trips exactly);
- non-finite floats are rejected, -0.0 collapses to 0.0;
- ASCII-only output, no whitespace.

q() is the quantizer; data is expected to pass through it once, at the
boundary where it becomes a payload, and stay canonical from then on.
"""

from __future__ import annotations

import json
import math
from typing import Any


def q(x: float) -> float:
    """Quantize to 9 significant decimal digits."""
    if not math.isfinite(x):
        raise ValueError(f"non-finite float in payload: {x!r}")
    if x == 0.0:
        return 0.0  # collapses -0.0 as well
    return float(f"{x:.9g}")


def qdeep(obj: Any) -> Any:
    """Recursively quantize floats; rebuilds containers, preserves key order."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return q(obj)
    if isinstance(obj, dict):
        return {k: qdeep(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [qdeep(v) for v in obj]
    raise TypeError(f"unsupported type in payload: {type(obj).__name__}")


def _fmt(obj: Any, out: list) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"non-finite float in payload: {obj!r}")
        # repr is shortest round-trip, so quantized values re-parse exactly;
        # keep the ".0" so floats stay floats after a decode/encode cycle
        out.append(repr(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=True))
    elif isinstance(obj, dict):
        out.append("{")
        first = True
        for k, v in obj.items():
            if not isinstance(k, str):
                raise TypeError(f"non-string key: {k!r}")
            if not first:
                out.append(",")
            first = False
            out.append(json.dumps(k, ensure_ascii=True))
            out.append(":")
            _fmt(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(",")
            _fmt(v, out)
        out.append("]")
    else:
        raise TypeError(f"unsupported type in payload: {type(obj).__name__}")


def dumps(obj: Any) -> str:
    out: list = []
    _fmt(obj, out)
    return "".join(out)


def dump_bytes(obj: Any) -> bytes:
    return dumps(obj).encode("ascii")


def loads(text: str | bytes) -> Any:
    """Plain json.loads; document order of keys is preserved by Python dicts."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    return json.loads(text)
