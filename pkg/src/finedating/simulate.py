"""Simulated radiocarbon measurements for known calendar dates.

One simulation draws a radiocarbon age from a normal distribution
centered on the curve mean at the given date, with variance
``sd^2 + sigma_curve(date)^2``, rounds it to an integer BP (ties away
from zero) and calibrates the rounded age.  Even with a nominal sd of
zero the draws disperse by the curve error.  Batch generation derives
one RNG substream per (date, replicate) so outputs are reproducible and
independent of scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import csvio, parallel
from .calcurve import CalCurve, Measurement, calibrate, curve_at


@dataclass(frozen=True)
class SimRecord:
    """One simulated measurement: the drawn integer age for a known
    calendar date, plus the summaries of its calibrated posterior."""

    sim_id: int
    base_date: float
    age: int
    sd: float
    cal_mean: float
    cal_median: float
    cal_sigma: float

    @property
    def measurement(self) -> Measurement:
        return Measurement(age=self.age, sd=self.sd)


@dataclass(frozen=True)
class TestDataset:
    """A cluster of simulated measurements sharing one original date.

    ``original_date`` is the control value used later to score the
    dating result; it never feeds the indicator computation itself.
    """

    data_id: int
    original_date: float
    sd: float
    records: tuple[SimRecord, ...]

    @property
    def measurements(self) -> tuple[Measurement, ...]:
        return tuple(r.measurement for r in self.records)


def round_half_away(x: float) -> int:
    """Round to nearest integer, ties away from zero."""
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def draw_age(curve: CalCurve, date: float, sd: float, rng: np.random.Generator) -> int:
    """Draw one integer radiocarbon age for a calendar date."""
    if sd < 0:
        raise ValueError(f"sd must be >= 0, got {sd}")
    mu, sig = curve_at(curve, date)
    g = rng.normal(mu, math.sqrt(sd * sd + sig * sig))
    return round_half_away(g)


def r_simulate(
    curve: CalCurve,
    date: float,
    sd: float,
    rng: np.random.Generator,
    sim_id: int = 0,
    grid_step: float = 1.0,
) -> SimRecord:
    """Simulate one measurement of an object with a known calendar date.

    The calibration stored in the record uses the same sd as the draw.
    """
    age = draw_age(curve, date, sd, rng)
    cal = calibrate(curve, Measurement(age=age, sd=sd), grid_step=grid_step)
    return SimRecord(
        sim_id=sim_id,
        base_date=float(date),
        age=age,
        sd=float(sd),
        cal_mean=cal.mean,
        cal_median=cal.median,
        cal_sigma=cal.sigma,
    )


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for a (seed, index...) coordinate."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(key))))


def generate_test_datasets(
    curve: CalCurve,
    dates: list[float],
    datasets_per_date: int,
    sd: float,
    seed: int,
    group_size: int = 3,
    grid_step: float = 1.0,
    workers: int = 1,
) -> list[TestDataset]:
    """Clusters of simulated measurements for every requested date.

    For each date, ``datasets_per_date`` datasets of ``group_size``
    measurements are drawn from the substream keyed by (date index,
    dataset index); ids are dense in date-major order.
    """
    if not dates:
        raise ValueError("no dates")
    if datasets_per_date < 1:
        raise ValueError(f"datasets_per_date must be >= 1, got {datasets_per_date}")
    if group_size < 1:
        raise ValueError(f"group_size must be >= 1, got {group_size}")

    jobs = [
        (di, ri, float(date))
        for di, date in enumerate(dates)
        for ri in range(datasets_per_date)
    ]

    def build(job: tuple[int, int, float]) -> TestDataset:
        di, ri, date = job
        rng = substream(seed, di, ri)
        index = di * datasets_per_date + ri
        recs = tuple(
            r_simulate(curve, date, sd, rng, sim_id=index * group_size + j + 1, grid_step=grid_step)
            for j in range(group_size)
        )
        return TestDataset(
            data_id=index + 1, original_date=date, sd=float(sd), records=recs
        )

    if workers is not None and workers > 1:
        # Warm the interpolation cache before forking so children share it.
        curve.grid(grid_step)
    return parallel.ordered_map(build, jobs, workers)


TEST_COLUMNS = ["data_id", "original_cal_date", "age_bp", "sd", "cal_mean", "cal_median", "cal_sigma"]


def write_tests(datasets: list[TestDataset], path, extra_header: dict | None = None) -> None:
    """Write test datasets as CSV, one row per measurement."""
    header = {"format": "finedating-tests", "datasets": len(datasets)}
    if extra_header:
        header.update(extra_header)
    lines = csvio.header_block(header)
    lines.append(",".join(TEST_COLUMNS))
    for ds in datasets:
        for rec in ds.records:
            lines.append(
                ",".join(
                    csvio.fmt(v)
                    for v in (
                        ds.data_id,
                        ds.original_date,
                        rec.age,
                        rec.sd,
                        rec.cal_mean,
                        rec.cal_median,
                        rec.cal_sigma,
                    )
                )
            )
    csvio.write_lines(path, lines)


def read_tests(path) -> list[TestDataset]:
    """Read datasets written by :func:`write_tests` (or converted from
    external simulation exports; blank calibration cells become NaN)."""
    _, columns, rows = csvio.read_commented_csv(path)
    if columns[: len(TEST_COLUMNS)] != TEST_COLUMNS:
        raise ValueError(f"unexpected test CSV columns in {path}: {columns}")
    grouped: dict[int, list[list[str]]] = {}
    order: list[int] = []
    for cells in rows:
        data_id = int(cells[0])
        if data_id not in grouped:
            grouped[data_id] = []
            order.append(data_id)
        grouped[data_id].append(cells)

    def cell_float(cells: list[str], i: int) -> float:
        val = csvio.parse_float(cells[i])
        return math.nan if val is None else val

    datasets = []
    sim_id = 0
    for data_id in order:
        cells_list = grouped[data_id]
        date = float(cells_list[0][1])
        sd = float(cells_list[0][3])
        recs = []
        for cells in cells_list:
            if float(cells[1]) != date or float(cells[3]) != sd:
                raise ValueError(
                    f"dataset {data_id} mixes original dates or sds in {path}"
                )
            sim_id += 1
            recs.append(
                SimRecord(
                    sim_id=sim_id,
                    base_date=date,
                    age=int(cells[2]),
                    sd=sd,
                    cal_mean=cell_float(cells, 4),
                    cal_median=cell_float(cells, 5),
                    cal_sigma=cell_float(cells, 6),
                )
            )
        datasets.append(
            TestDataset(data_id=data_id, original_date=date, sd=sd, records=tuple(recs))
        )
    return datasets
