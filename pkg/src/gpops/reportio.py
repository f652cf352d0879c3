"""Deterministic JSON/CSV writers for reports.

Numbers are rendered with 17 significant digits so serialized values
round-trip to the exact double; combined with fixed key order this makes
outputs byte-identical across runs with equal inputs.
"""

from __future__ import annotations

import math

from .errors import ParameterError

__all__ = ["format_number", "dumps_json", "csv_lines"]


def format_number(x) -> str:
    if isinstance(x, bool):
        raise ParameterError("booleans are not numbers here")
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if not math.isfinite(x):
        raise ParameterError(f"cannot serialize non-finite number {x!r}")
    return format(x, ".17g")


def _escape(s: str) -> str:
    out = []
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    return "".join(out)


def _emit(obj, indent, out):
    pad = "  " * indent
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, float)):
        out.append(format_number(obj))
    elif isinstance(obj, str):
        out.append(f'"{_escape(obj)}"')
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, value) in enumerate(obj.items()):
            if not isinstance(key, str):
                raise ParameterError(f"JSON keys must be strings, got {key!r}")
            out.append(f'{pad}  "{_escape(key)}": ')
            _emit(value, indent + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, value in enumerate(obj):
            out.append(pad + "  ")
            _emit(value, indent + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "]")
    else:
        raise ParameterError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj) -> str:
    """Serialize to JSON with insertion-ordered keys and 17-digit floats."""
    out = []
    _emit(obj, 0, out)
    out.append("\n")
    return "".join(out)


def csv_lines(header, rows) -> str:
    """CSV text with numbers in 17-significant-digit form and '\\n' endings."""
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, bool):
                cells.append("true" if cell else "false")
            elif isinstance(cell, (int, float)):
                cells.append(format_number(cell))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
