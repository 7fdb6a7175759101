"""Indicator-quality lookup: per value bucket, how often each indicator
landed near the true date.

Evaluated datasets are bucketed by indicator value into half-open
5-year intervals [left, left + width); a record can land in different
buckets under different indicators.  For every (bucket, indicator) the
table stores the record count and the percentage of records whose
absolute deviation stayed within 12 and within 25 years.  Consulting
the bucket of a fresh dating result then tells which indicator tends to
be reliable at that value, without knowing the true date.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import csvio
from .evaluate import NO_MATCH, EvalRow
from .finedate import INDICATOR_NAMES, normalize_indicator


@dataclass(frozen=True)
class BucketStats:
    total_count: int
    frac12: float | None
    frac25: float | None


@dataclass(frozen=True)
class LookupTable:
    bucket_width: float
    tolerances: tuple[float, float]
    bucket_lefts: tuple[float, ...]
    indicators: tuple[str, ...]
    cells: dict[tuple[float, str], BucketStats]

    def covered_range(self) -> tuple[float, float]:
        return self.bucket_lefts[0], self.bucket_lefts[-1] + self.bucket_width


def bucket_left(value: float, width: float) -> float:
    """Left edge of the half-open bucket containing value; a value on an
    edge belongs to the bucket starting there."""
    return math.floor(value / width) * width


def build_lookup(
    rows: list[EvalRow],
    bucket_width: float = 5.0,
    tolerances: tuple[float, float] = (12.0, 25.0),
) -> LookupTable:
    """Bucket every indicator independently by its own value and count
    the deviations within the two tolerances.

    Fractions are percentages at 0.01% resolution; empty (bucket,
    indicator) cells carry count 0 and blank fractions.  Buckets span
    the observed value range snapped outward to multiples of the width.
    """
    if bucket_width <= 0:
        raise ValueError(f"bucket_width must be > 0, got {bucket_width}")
    tol_lo, tol_hi = sorted(tolerances)
    usable = [r for r in rows if r.category != NO_MATCH and r.value is not None]
    if not usable:
        raise ValueError("no matched evaluation rows to bucket")

    counts: dict[tuple[float, str], list[int]] = {}
    lo = math.inf
    hi = -math.inf
    for row in usable:
        left = bucket_left(row.value, bucket_width)
        lo = min(lo, left)
        hi = max(hi, left)
        cell = counts.setdefault((left, row.indicator), [0, 0, 0])
        cell[0] += 1
        if abs(row.delta) <= tol_lo:
            cell[1] += 1
        if abs(row.delta) <= tol_hi:
            cell[2] += 1

    n_buckets = int(round((hi - lo) / bucket_width)) + 1
    lefts = tuple(lo + i * bucket_width for i in range(n_buckets))
    cells: dict[tuple[float, str], BucketStats] = {}
    for left in lefts:
        for name in INDICATOR_NAMES:
            raw = counts.get((left, name))
            if raw is None:
                cells[(left, name)] = BucketStats(0, None, None)
            else:
                total, k12, k25 = raw
                cells[(left, name)] = BucketStats(
                    total_count=total,
                    frac12=round(100.0 * k12 / total, 2),
                    frac25=round(100.0 * k25 / total, 2),
                )
    return LookupTable(
        bucket_width=float(bucket_width),
        tolerances=(float(tol_lo), float(tol_hi)),
        bucket_lefts=lefts,
        indicators=INDICATOR_NAMES,
        cells=cells,
    )


def query_lookup(
    table: LookupTable, indicator: str, value: float
) -> tuple[float, int, float | None, float | None]:
    """(bucket left, count, frac12, frac25) for the bucket holding value."""
    name = normalize_indicator(indicator)
    lo, hi = table.covered_range()
    if not (lo <= value < hi):
        raise ValueError(
            f"outside lookup range: {value:g} not in [{lo:g}, {hi:g})"
        )
    left = bucket_left(value, table.bucket_width)
    stats = table.cells[(left, name)]
    return left, stats.total_count, stats.frac12, stats.frac25


def write_lookup(table: LookupTable, path, extra_header: dict | None = None) -> None:
    """One row per bucket; per indicator the columns
    ``<Ind>_TotalCount, <Ind>_Frac12, <Ind>_Frac25``."""
    header = {
        "format": "finedating-lookup",
        "bucket_width": table.bucket_width,
        "tolerances": f"{table.tolerances[0]:g};{table.tolerances[1]:g}",
    }
    if extra_header:
        header.update(extra_header)
    lines = csvio.header_block(header)
    columns = ["BucketLeft"]
    for name in table.indicators:
        columns.extend([f"{name}_TotalCount", f"{name}_Frac12", f"{name}_Frac25"])
    lines.append(",".join(columns))
    for left in table.bucket_lefts:
        cells = [csvio.fmt(left)]
        for name in table.indicators:
            stats = table.cells[(left, name)]
            cells.extend(
                [csvio.fmt(stats.total_count), csvio.fmt(stats.frac12), csvio.fmt(stats.frac25)]
            )
        lines.append(",".join(cells))
    csvio.write_lines(path, lines)


def read_lookup(path) -> LookupTable:
    meta, columns, rows = csvio.read_commented_csv(path)
    if meta.get("format") != "finedating-lookup" or not columns or columns[0] != "BucketLeft":
        raise ValueError(f"not a lookup table file: {path}")
    width = float(meta["bucket_width"])
    tol = tuple(float(t) for t in meta["tolerances"].split(";"))
    indicators = []
    for col in columns[1::3]:
        if not col.endswith("_TotalCount"):
            raise ValueError(f"not a lookup table file: unexpected column {col!r}")
        indicators.append(col[: -len("_TotalCount")])
    lefts = []
    cells: dict[tuple[float, str], BucketStats] = {}
    for cells_row in rows:
        left = float(cells_row[0])
        lefts.append(left)
        for k, name in enumerate(indicators):
            total = int(cells_row[1 + 3 * k])
            frac12 = csvio.parse_float(cells_row[2 + 3 * k])
            frac25 = csvio.parse_float(cells_row[3 + 3 * k])
            cells[(left, name)] = BucketStats(total, frac12, frac25)
    return LookupTable(
        bucket_width=width,
        tolerances=(tol[0], tol[1]),
        bucket_lefts=tuple(lefts),
        indicators=tuple(indicators),
        cells=cells,
    )
