"""Deterministic text encoding for CSV and JSON payloads.

Every real number is printed with 17 significant digits so that parsing the
text recovers the original double bit-for-bit.  All CLI output and every CSV
writer in the package goes through these helpers, which is what makes repeated
runs byte-identical.
"""

from __future__ import annotations

import math


def f17(x: float) -> str:
    """Format a float with 17 significant digits (exact double round trip)."""
    if isinstance(x, bool):  # bool is an int subclass; keep it out of %g
        raise TypeError("f17 expects a real number")
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"non-finite value in output: {x!r}")
    return f"{x:.17g}"


def json_text(obj, indent: int = 0) -> str:
    """Serialise a nested dict/list structure to JSON with f17 floats.

    Supports the types the CLI actually emits: dict (string keys), list,
    str, bool, None, int, float.
    """
    pad = " " * indent
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        # CLI payloads are plain ASCII identifiers and paths.
        escaped = obj.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return f17(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json_text(str(k))}: {json_text(v, indent + 2)}'
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}  {json_text(v, indent + 2)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")
