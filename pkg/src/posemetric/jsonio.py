"""JSON writing with fixed float formatting.

All structured files written by this package serialize floats with 17
significant digits (lossless for IEEE doubles and diff-able across runs).
Non-finite values use the stdlib spellings (Infinity, -Infinity, NaN), which
``json.loads`` accepts back by default.
"""
from __future__ import annotations

import json
import math


def _format(value, parts: list, indent: int) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            parts.append("{}")
            return
        parts.append("{\n")
        for i, (k, v) in enumerate(value.items()):
            parts.append(f'{pad}  {json.dumps(str(k))}: ')
            _format(v, parts, indent + 1)
            parts.append(",\n" if i < len(value) - 1 else "\n")
        parts.append(pad + "}")
    elif isinstance(value, (list, tuple)):
        seq = list(value)
        if not seq:
            parts.append("[]")
            return
        flat = all(isinstance(v, (int, float, bool)) or v is None for v in seq)
        if flat:
            parts.append("[")
            for i, v in enumerate(seq):
                _format(v, parts, indent)
                if i < len(seq) - 1:
                    parts.append(", ")
            parts.append("]")
        else:
            parts.append("[\n")
            for i, v in enumerate(seq):
                parts.append(pad + "  ")
                _format(v, parts, indent + 1)
                parts.append(",\n" if i < len(seq) - 1 else "\n")
            parts.append(pad + "]")
    elif isinstance(value, bool):
        parts.append("true" if value else "false")
    elif value is None:
        parts.append("null")
    elif isinstance(value, int):
        parts.append(str(value))
    elif isinstance(value, float):
        if math.isnan(value):
            parts.append("NaN")
        elif math.isinf(value):
            parts.append("Infinity" if value > 0 else "-Infinity")
        else:
            parts.append(format(value, ".17g"))
    else:
        parts.append(json.dumps(value))


def dumps(obj) -> str:
    parts: list = []
    _format(obj, parts, 0)
    parts.append("\n")
    return "".join(parts)


def dump_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


def load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
