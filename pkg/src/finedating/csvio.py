"""Small helpers shared by the CSV writers and readers.

All artifact files are plain CSV with a leading block of ``# key=value``
comment lines.  Formatting is fully deterministic (shortest round-trip
float repr, no timestamps) so that rebuilding with the same seed yields
byte-identical files.
"""

from __future__ import annotations

import math
import zlib
from pathlib import Path


def fmt(value) -> str:
    """Deterministic, lossless cell formatting."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    x = float(value)
    if math.isnan(x):
        return ""
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def parse_float(cell: str) -> float | None:
    cell = cell.strip()
    if not cell:
        return None
    return float(cell)


def header_block(pairs: dict) -> list[str]:
    return [f"# {key}={fmt(val)}" for key, val in pairs.items()]


def write_lines(path, lines: list[str]) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line)
            fh.write("\n")


def read_commented_csv(path) -> tuple[dict, list[str], list[list[str]]]:
    """Return (header key/values, column names, data rows) of a file."""
    meta: dict[str, str] = {}
    columns: list[str] = []
    rows: list[list[str]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, val = body.partition("=")
                    meta[key.strip()] = val.strip()
                continue
            cells = [c.strip() for c in line.split(",")]
            if not columns:
                columns = cells
            else:
                rows.append(cells)
    return meta, columns, rows


def rows_checksum(lines: list[str]) -> int:
    """crc32 over the data lines of a table, header excluded."""
    crc = 0
    for line in lines:
        crc = zlib.crc32(line.encode("utf-8"), crc)
        crc = zlib.crc32(b"\n", crc)
    return crc
