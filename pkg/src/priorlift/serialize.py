"""Deterministic output encoding.

JSON floats are printed with 17 significant digits (full float64
round-trip); CSV cells use the same format. Tables for humans round to 6
significant digits. Nothing here depends on hash order or wall time, so
identical inputs produce identical bytes.
"""

from __future__ import annotations

import csv
import enum
import io
import json

import numpy as np

from .harness import MseCurve

__all__ = ["format_float", "dumps_json", "write_curve_csv", "curve_csv_text", "render_table"]

JSON_DIGITS = 17
TABLE_DIGITS = 6


def format_float(value: float, digits: int = JSON_DIGITS) -> str:
    return format(float(value), f".{digits}g")


def _encode(value, digits, indent, level):
    pad = " " * (indent * level)
    inner = " " * (indent * (level + 1))
    if value is None:
        return "null"
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if value else "false"
    if isinstance(value, enum.Enum):
        return _encode(value.value, digits, indent, level)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            return "null"
        return format_float(value, digits)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, np.ndarray):
        return _encode(value.tolist(), digits, indent, level)
    if isinstance(value, dict):
        if not value:
            return "{}"
        parts = [
            f'{inner}"{key}": {_encode(item, digits, indent, level + 1)}'
            for key, item in value.items()
        ]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        parts = [
            f"{inner}{_encode(item, digits, indent, level + 1)}" for item in value
        ]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps_json(value, digits: int = JSON_DIGITS) -> str:
    """Serialize dict/list/scalar trees with fixed float formatting."""
    return _encode(value, digits, indent=2, level=0) + "\n"


CURVE_COLUMNS = (
    "r",
    "n_minus_r",
    "mse_semi",
    "mse_classical",
    "ratio",
    "replicates_used",
    "failures",
)


def _curve_rows(curve: MseCurve):
    for cell in curve.cells:
        yield [
            cell.r,
            cell.n_minus_r,
            "" if cell.mse_semi is None else format_float(cell.mse_semi),
            "" if cell.mse_classical is None else format_float(cell.mse_classical),
            "" if cell.ratio is None else format_float(cell.ratio),
            cell.replicates_used,
            cell.failures,
        ]


def curve_csv_text(curve: MseCurve) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CURVE_COLUMNS)
    writer.writerows(_curve_rows(curve))
    return buffer.getvalue()


def write_curve_csv(curve: MseCurve, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        handle.write(curve_csv_text(curve))


def render_table(headers, rows, digits: int = TABLE_DIGITS) -> str:
    """Fixed-width text table; floats shortened for reading."""

    def cell(value):
        if value is None:
            return "-"
        if isinstance(value, enum.Enum):
            return str(value.value)
        if isinstance(value, (float, np.floating)):
            return format_float(value, digits)
        return str(value)

    table = [[cell(v) for v in row] for row in rows]
    widths = [
        max(len(headers[i]), *(len(row[i]) for row in table)) if table else len(headers[i])
        for i in range(len(headers))
    ]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
        "  ".join("-" * w for w in widths),
    ]
    lines += ["  ".join(row[i].ljust(widths[i]) for i in range(len(row))) for row in table]
    return "\n".join(lines) + "\n"
