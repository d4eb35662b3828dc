"""Locale-independent JSON and CSV number formatting."""

import json
import math
from pathlib import Path
from typing import Any, TextIO

FULL_PRECISION = 17


def format_float(value: float | None, precision: int | None = None) -> str:
    """Render a float for CSV output.

    ``None`` and NaN become an empty field. Without a precision the value is
    written with 17 significant digits so it round-trips exactly.
    """
    if value is None or math.isnan(value):
        return ""
    digits = FULL_PRECISION if precision is None else precision
    return format(float(value), f".{digits}g")


def round_floats(data: Any, precision: int | None) -> Any:
    """Recursively round every float in a JSON-like structure."""
    if precision is None:
        return data
    if isinstance(data, float):
        if not math.isfinite(data):
            return data
        return float(format(data, f".{precision}g"))
    if isinstance(data, dict):
        return {key: round_floats(value, precision) for key, value in data.items()}
    if isinstance(data, list | tuple):
        return [round_floats(item, precision) for item in data]
    return data


def dumps(data: Any, precision: int | None = None) -> str:
    """Serialize to JSON with stable key order and a trailing newline."""
    return json.dumps(round_floats(data, precision), indent=2, allow_nan=False) + "\n"


def write_text(text: str, out: Path | None, stream: TextIO) -> None:
    """Write text to a file when a path is given, otherwise to the stream."""
    if out is None:
        stream.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
