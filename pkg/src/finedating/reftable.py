"""Reference tables: repeated simulations on a uniform date grid.

A table is built from a spec (grid step, measurements per time step,
sd, span, seed) by drawing ``per_slice`` simulated measurements at
every grid date.  The standard variants are named ``step_per_sd``
(``5_20_5`` = 5-year grid, 20 measurements per slice, sd 5); the Combo
table concatenates the six 5-year variants.  Tables are immutable after
build; matching is served by a lazily built age index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import csvio, parallel
from .calcurve import CalCurve, curve_at
from .simulate import SimRecord, r_simulate, substream

RefRecord = SimRecord


@dataclass(frozen=True)
class RefTableSpec:
    """Build parameters of one reference table variant."""

    label: str
    year_interval: int
    per_slice: int
    sd: float
    span: tuple[float, float]
    seed: int

    def __post_init__(self) -> None:
        if self.year_interval < 1:
            raise ValueError(f"year_interval must be >= 1, got {self.year_interval}")
        if self.per_slice < 1:
            raise ValueError("empty spec: per_slice must be >= 1")
        oldest, youngest = self.span
        if not oldest < youngest:
            raise ValueError(f"span oldest must precede youngest, got {self.span}")
        n = (youngest - oldest) / self.year_interval
        if abs(n - round(n)) > 1e-9:
            raise ValueError(
                f"span {self.span} is not a whole number of {self.year_interval}-year steps"
            )

    @property
    def n_slices(self) -> int:
        oldest, youngest = self.span
        return int(round((youngest - oldest) / self.year_interval)) + 1

    @property
    def n_records(self) -> int:
        return self.n_slices * self.per_slice

    def slice_dates(self) -> list[float]:
        oldest, _ = self.span
        return [oldest + i * self.year_interval for i in range(self.n_slices)]


# Standard table variants: label -> (year_interval, per_slice, sd, span).
# The Combo table is the concatenation of the six 5-year variants.
STANDARD_SPECS: dict[str, tuple[int, int, float, tuple[float, float]]] = {
    "1_50_5": (1, 50, 5.0, (-200.0, -1.0)),
    "5_10_20": (5, 10, 20.0, (-300.0, 20.0)),
    "5_20_5": (5, 20, 5.0, (-300.0, 20.0)),
    "5_50_5": (5, 50, 5.0, (-300.0, 20.0)),
    "5_50_20": (5, 50, 20.0, (-300.0, 20.0)),
    "5_80_5": (5, 80, 5.0, (-300.0, 20.0)),
    "5_100_0": (5, 100, 0.0, (-300.0, 20.0)),
    "5_100_5": (5, 100, 5.0, (-300.0, 20.0)),
}

COMBO_COMPONENTS = ("5_20_5", "5_50_5", "5_50_20", "5_80_5", "5_100_0", "5_100_5")


def standard_spec(label: str, seed: int) -> RefTableSpec:
    """Spec for a standard variant name such as ``5_20_5``."""
    try:
        interval, per_slice, sd, span = STANDARD_SPECS[label]
    except KeyError:
        raise ValueError(
            f"unknown table variant {label!r}; known: {', '.join(STANDARD_SPECS)}"
        ) from None
    return RefTableSpec(
        label=label, year_interval=interval, per_slice=per_slice, sd=sd, span=span, seed=seed
    )


@dataclass(eq=False)
class RefTable:
    label: str
    curve_name: str
    specs: tuple[RefTableSpec, ...]
    records: tuple[SimRecord, ...]
    _age_index: dict | None = field(default=None, repr=False)

    @property
    def span(self) -> tuple[float, float]:
        return (
            min(s.span[0] for s in self.specs),
            max(s.span[1] for s in self.specs),
        )

    def age_index(self) -> dict[int, tuple[SimRecord, ...]]:
        """Records grouped by integer age, built once."""
        if self._age_index is None:
            idx: dict[int, list[SimRecord]] = {}
            for rec in self.records:
                idx.setdefault(rec.age, []).append(rec)
            self._age_index = {age: tuple(recs) for age, recs in idx.items()}
        return self._age_index


def build_reference_table(
    curve: CalCurve,
    spec: RefTableSpec,
    grid_step: float = 1.0,
    workers: int = 1,
) -> RefTable:
    """Simulate ``per_slice`` measurements at every grid date of the spec.

    Each slice uses the substream keyed by its index, so rebuilding with
    the same seed reproduces the table exactly for any worker count.
    """
    lo, hi = curve.domain
    oldest, youngest = spec.span
    if oldest < lo or youngest > hi:
        raise ValueError(
            f"span {spec.span} outside curve domain [{lo}, {hi}] of {curve.name!r}"
        )

    dates = spec.slice_dates()

    def build_slice(job: tuple[int, float]) -> list[SimRecord]:
        si, date = job
        rng = substream(spec.seed, si)
        base = si * spec.per_slice
        return [
            r_simulate(curve, date, spec.sd, rng, sim_id=base + j + 1, grid_step=grid_step)
            for j in range(spec.per_slice)
        ]

    if workers is not None and workers > 1:
        curve.grid(grid_step)
    slices = parallel.ordered_map(build_slice, list(enumerate(dates)), workers)
    records = tuple(rec for chunk in slices for rec in chunk)
    return RefTable(label=spec.label, curve_name=curve.name, specs=(spec,), records=records)


def build_combo_table(
    curve: CalCurve,
    specs: list[RefTableSpec],
    label: str = "Combo",
    grid_step: float = 1.0,
    workers: int = 1,
) -> RefTable:
    """Concatenate component tables, re-assigning dense record ids."""
    if not specs:
        raise ValueError("empty spec: combo needs at least one component")
    spans = {s.span for s in specs}
    steps = {s.year_interval for s in specs}
    if len(spans) > 1 or len(steps) > 1:
        raise ValueError(
            f"incompatible specs: combo components must share span and step, got spans {sorted(spans)} steps {sorted(steps)}"
        )
    records: list[SimRecord] = []
    next_id = 1
    for spec in specs:
        part = build_reference_table(curve, spec, grid_step=grid_step, workers=workers)
        for rec in part.records:
            records.append(
                SimRecord(
                    sim_id=next_id,
                    base_date=rec.base_date,
                    age=rec.age,
                    sd=rec.sd,
                    cal_mean=rec.cal_mean,
                    cal_median=rec.cal_median,
                    cal_sigma=rec.cal_sigma,
                )
            )
            next_id += 1
    return RefTable(
        label=label, curve_name=curve.name, specs=tuple(specs), records=tuple(records)
    )


TABLE_COLUMNS = ["id", "cal_date", "age_bp", "sd", "cal_mean", "cal_median", "cal_sigma"]


def write_table(table: RefTable, path, extra_header: dict | None = None) -> None:
    """Persist a table as commented CSV with its specs and a checksum."""
    data_lines = [
        ",".join(
            csvio.fmt(v)
            for v in (
                rec.sim_id,
                rec.base_date,
                rec.age,
                rec.sd,
                rec.cal_mean,
                rec.cal_median,
                rec.cal_sigma,
            )
        )
        for rec in table.records
    ]
    header = {
        "format": "finedating-reftable",
        "label": table.label,
        "curve": table.curve_name,
        "seed": ";".join(str(s.seed) for s in table.specs),
        "records": len(data_lines),
        "checksum": csvio.rows_checksum(data_lines),
    }
    if extra_header:
        header.update(extra_header)
    lines = csvio.header_block(header)
    for spec in table.specs:
        lines.append(
            "# spec="
            + ",".join(
                csvio.fmt(v)
                for v in (
                    spec.label,
                    spec.year_interval,
                    spec.per_slice,
                    spec.sd,
                    spec.span[0],
                    spec.span[1],
                    spec.seed,
                )
            )
        )
    lines.append(",".join(TABLE_COLUMNS))
    lines.extend(data_lines)
    csvio.write_lines(path, lines)


def read_table(path) -> RefTable:
    """Read a table written by :func:`write_table`, validating shape,
    checksum and record invariants."""
    meta: dict[str, str] = {}
    specs: list[RefTableSpec] = []
    columns: list[str] = []
    data_lines: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                key, _, val = body.partition("=")
                key, val = key.strip(), val.strip()
                if key == "spec":
                    parts = val.split(",")
                    if len(parts) != 7:
                        raise ValueError(f"corrupt table: bad spec header in {path}")
                    specs.append(
                        RefTableSpec(
                            label=parts[0],
                            year_interval=int(parts[1]),
                            per_slice=int(parts[2]),
                            sd=float(parts[3]),
                            span=(float(parts[4]), float(parts[5])),
                            seed=int(parts[6]),
                        )
                    )
                else:
                    meta[key] = val
                continue
            if not columns:
                columns = [c.strip() for c in line.split(",")]
            else:
                data_lines.append(line)

    if meta.get("format") != "finedating-reftable" or not specs or columns != TABLE_COLUMNS:
        raise ValueError(f"corrupt table: {path} is not a reference table file")
    expected = int(meta.get("records", "-1"))
    if expected != len(data_lines):
        raise ValueError(
            f"corrupt table: {path} holds {len(data_lines)} rows, header says {expected}"
        )
    if "checksum" in meta and int(meta["checksum"]) != csvio.rows_checksum(data_lines):
        raise ValueError(f"corrupt table: checksum mismatch in {path}")

    records = []
    for line in data_lines:
        cells = line.split(",")
        records.append(
            SimRecord(
                sim_id=int(cells[0]),
                base_date=float(cells[1]),
                age=int(cells[2]),
                sd=float(cells[3]),
                cal_mean=float(cells[4]),
                cal_median=float(cells[5]),
                cal_sigma=float(cells[6]),
            )
        )
    table = RefTable(
        label=meta.get("label", specs[0].label),
        curve_name=meta.get("curve", ""),
        specs=tuple(specs),
        records=tuple(records),
    )
    _validate_table(table)
    return table


def _validate_table(table: RefTable) -> None:
    expected = sum(s.n_records for s in table.specs)
    if len(table.records) != expected:
        raise ValueError(
            f"corrupt table: {len(table.records)} records, specs require {expected}"
        )
    ids = [rec.sim_id for rec in table.records]
    if ids != list(range(1, len(ids) + 1)):
        raise ValueError("corrupt table: record ids are not dense from 1")
    oldest, youngest = table.span
    for rec in table.records:
        if not (oldest <= rec.base_date <= youngest):
            raise ValueError(
                f"corrupt table: record {rec.sim_id} date {rec.base_date} outside span"
            )


def buffer_margin(table: RefTable, curve: CalCurve | None = None, sd: float | None = None) -> float:
    """Recommended distance between the table span edges and the dates
    under analysis: 3 * (sd + max curve error over the span).

    Dispersion pushes simulated ages past the span edges, so analyses
    closer than this to an edge lose matches on one side.
    """
    sds = [s.sd for s in table.specs]
    use_sd = max(sds) if sd is None else sd
    if curve is None:
        return 3.0 * use_sd
    oldest, youngest = table.span
    max_err = max(curve_at(curve, oldest)[1], curve_at(curve, youngest)[1])
    n = 16
    for i in range(n + 1):
        d = oldest + (youngest - oldest) * i / n
        max_err = max(max_err, curve_at(curve, d)[1])
    return 3.0 * (use_sd + max_err)


def edge_warnings(
    table: RefTable,
    analysis_dates: list[float],
    curve: CalCurve | None = None,
    sd: float | None = None,
) -> list[str]:
    """Human-readable warnings when analysis dates sit too close to the
    table span edges (insufficient buffer)."""
    if not analysis_dates:
        return []
    margin = buffer_margin(table, curve, sd)
    oldest, youngest = table.span
    warnings = []
    lo, hi = min(analysis_dates), max(analysis_dates)
    if lo - oldest < margin:
        warnings.append(
            f"old edge of table span ({oldest:g}) is within {margin:.0f} years of the "
            f"oldest analysis date ({lo:g}); matches will be truncated on the old side"
        )
    if youngest - hi < margin:
        warnings.append(
            f"young edge of table span ({youngest:g}) is within {margin:.0f} years of the "
            f"youngest analysis date ({hi:g}); matches will be truncated on the young side"
        )
    return warnings


def records_by_slice(table: RefTable) -> dict[float, list[SimRecord]]:
    """Records grouped by base date, in span order."""
    groups: dict[float, list[SimRecord]] = {}
    for rec in table.records:
        groups.setdefault(rec.base_date, []).append(rec)
    return dict(sorted(groups.items()))


def age_span(table: RefTable) -> tuple[int, int]:
    ages = [rec.age for rec in table.records]
    return min(ages), max(ages)
