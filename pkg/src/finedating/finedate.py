"""Exact-match retrieval and the twelve central-tendency indicators.

Each measured age pulls every reference record with the same integer
age.  The matched records are pooled as multisets (duplicates kept:
repeated measured ages contribute their full match lists again), and
three value families are aggregated: the simulated calendar dates, the
calibrated means and the calibrated medians.  Every family yields a
mean, a median, and the same pair over the deduplicated values, for
twelve indicators in total.  Means are unweighted throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import csvio
from .calcurve import Measurement
from .reftable import RefTable, SimRecord

# Canonical indicator names, in report order.  The leading token is the
# value family (CalDate = simulated calendar dates, Mean = calibrated
# means, Median = calibrated medians); the trailing token is the
# aggregation applied to the pooled multiset.
INDICATOR_NAMES = (
    "CalDate_Mean",
    "CalDate_Median",
    "unique_CalDate_Mean",
    "unique_CalDate_Median",
    "Mean_Mean",
    "Mean_Median",
    "unique_Mean_Mean",
    "unique_Mean_Median",
    "Median_Mean",
    "Median_Median",
    "unique_Median_Mean",
    "unique_Median_Median",
)

FAMILIES = {
    "CalDate": (
        "CalDate_Mean",
        "CalDate_Median",
        "unique_CalDate_Mean",
        "unique_CalDate_Median",
    ),
    "Mean": ("Mean_Mean", "Mean_Median", "unique_Mean_Mean", "unique_Mean_Median"),
    "Median": (
        "Median_Mean",
        "Median_Median",
        "unique_Median_Mean",
        "unique_Median_Median",
    ),
}

_CANON = {name.replace("_", "").casefold(): name for name in INDICATOR_NAMES}


def normalize_indicator(name: str) -> str:
    """Map loose spellings (``CalDateMedian``, ``caldate median``) to the
    canonical indicator name."""
    key = name.strip().replace("_", "").replace(" ", "").casefold()
    try:
        return _CANON[key]
    except KeyError:
        raise ValueError(
            f"unknown indicator {name!r}; known: {', '.join(INDICATOR_NAMES)}"
        ) from None


@dataclass(frozen=True)
class MatchSet:
    """All reference records matched by a set of measurements.

    ``per_measurement[i]`` holds the full match list of measurement i
    (empty when unmatched); ``unmatched`` lists the measured ages that
    found no record, in input order.
    """

    measurements: tuple[Measurement, ...]
    per_measurement: tuple[tuple[SimRecord, ...], ...]
    unmatched: tuple[int, ...]

    @property
    def n_prime(self) -> int:
        return sum(len(m) for m in self.per_measurement)

    def pooled_dates(self) -> list[float]:
        return [rec.base_date for matches in self.per_measurement for rec in matches]

    def pooled_means(self) -> list[float]:
        return [rec.cal_mean for matches in self.per_measurement for rec in matches]

    def pooled_medians(self) -> list[float]:
        return [rec.cal_median for matches in self.per_measurement for rec in matches]

    def records(self) -> list[tuple[int, SimRecord]]:
        """(measurement index, record) pairs in pooled order."""
        return [
            (i, rec)
            for i, matches in enumerate(self.per_measurement)
            for rec in matches
        ]

    def unique_measured_ages(self) -> int:
        """Diagnostic count of distinct measured ages (matching itself
        always runs over the full measurement multiset)."""
        return len({m.age for m in self.measurements})


def match_measurements(table: RefTable, measurements: list[Measurement]) -> MatchSet:
    """Exact integer-age retrieval against a reference table.

    Duplicate measured ages each contribute their own full match list.
    Unmatched ages are recorded, never dropped silently; only a fully
    unmatched input is an error.
    """
    if not measurements:
        raise ValueError("no measurements")
    index = table.age_index()
    per: list[tuple[SimRecord, ...]] = []
    unmatched: list[int] = []
    for meas in measurements:
        hits = index.get(meas.age, ())
        per.append(hits)
        if not hits:
            unmatched.append(meas.age)
    if all(len(m) == 0 for m in per):
        lo, hi = table.span
        raise ValueError(
            "no matches in reference table: none of the measured ages occur in "
            f"{table.label!r} (span {lo:g}..{hi:g}; check span and buffer)"
        )
    return MatchSet(
        measurements=tuple(measurements),
        per_measurement=tuple(per),
        unmatched=tuple(unmatched),
    )


@dataclass(frozen=True)
class IndicatorSet:
    """The twelve estimates of the target calendar date."""

    caldate_mean: float
    caldate_median: float
    u_caldate_mean: float
    u_caldate_median: float
    mean_mean: float
    mean_median: float
    u_mean_mean: float
    u_mean_median: float
    median_mean: float
    median_median: float
    u_median_mean: float
    u_median_median: float
    n_pooled: int
    n_unique_caldate: int
    n_unique_mean: int
    n_unique_median: int

    _ATTR = {
        "CalDate_Mean": "caldate_mean",
        "CalDate_Median": "caldate_median",
        "unique_CalDate_Mean": "u_caldate_mean",
        "unique_CalDate_Median": "u_caldate_median",
        "Mean_Mean": "mean_mean",
        "Mean_Median": "mean_median",
        "unique_Mean_Mean": "u_mean_mean",
        "unique_Mean_Median": "u_mean_median",
        "Median_Mean": "median_mean",
        "Median_Median": "median_median",
        "unique_Median_Mean": "u_median_mean",
        "unique_Median_Median": "u_median_median",
    }

    def value(self, indicator: str) -> float:
        return getattr(self, self._ATTR[normalize_indicator(indicator)])

    def n_used(self, indicator: str) -> int:
        name = normalize_indicator(indicator)
        if not name.startswith("unique_"):
            return self.n_pooled
        family = name.split("_")[1]
        return {
            "CalDate": self.n_unique_caldate,
            "Mean": self.n_unique_mean,
            "Median": self.n_unique_median,
        }[family]

    def as_rows(self) -> list[tuple[str, float, int]]:
        return [(name, self.value(name), self.n_used(name)) for name in INDICATOR_NAMES]


def _mean(values: list[float]) -> float:
    return float(np.mean(values))


def _median(values: list[float]) -> float:
    return float(np.median(values))


def compute_indicators(matches: MatchSet) -> IndicatorSet:
    """Aggregate the pooled multisets into the twelve indicators.

    Unique variants deduplicate the pooled multiset by exact value
    before aggregating; deduplication is global over the pool, not per
    measurement.
    """
    if matches.n_prime < 1:
        raise ValueError("nothing to aggregate: match set is empty")
    dates = matches.pooled_dates()
    means = matches.pooled_means()
    medians = matches.pooled_medians()
    u_dates = sorted(set(dates))
    u_means = sorted(set(means))
    u_medians = sorted(set(medians))
    return IndicatorSet(
        caldate_mean=_mean(dates),
        caldate_median=_median(dates),
        u_caldate_mean=_mean(u_dates),
        u_caldate_median=_median(u_dates),
        mean_mean=_mean(means),
        mean_median=_median(means),
        u_mean_mean=_mean(u_means),
        u_mean_median=_median(u_means),
        median_mean=_mean(medians),
        median_median=_median(medians),
        u_median_mean=_mean(u_medians),
        u_median_median=_median(u_medians),
        n_pooled=matches.n_prime,
        n_unique_caldate=len(u_dates),
        n_unique_mean=len(u_means),
        n_unique_median=len(u_medians),
    )


OVERVIEW_COLUMNS = [
    "measurement_index",
    "measured_age",
    "ref_id",
    "ref_cal_date",
    "ref_cal_mean",
    "ref_cal_median",
    "ref_cal_sigma",
]

SUMMARY_COLUMNS = ["indicator", "value", "n_used"]


def write_report(
    matches: MatchSet,
    indicators: IndicatorSet,
    prefix,
    extra_header: dict | None = None,
) -> tuple[str, str]:
    """Write the matched-record overview and the indicator summary.

    Produces ``<prefix>_overview.csv`` (one row per matched record) and
    ``<prefix>_summary.csv`` (the twelve indicators, then diagnostic
    rows including any unmatched measured ages).  Returns both paths.
    """
    prefix = str(prefix)
    header = dict(extra_header or {})

    overview_path = prefix + "_overview.csv"
    lines = csvio.header_block({"format": "finedating-overview", **header})
    lines.append(",".join(OVERVIEW_COLUMNS))
    for i, rec in matches.records():
        lines.append(
            ",".join(
                csvio.fmt(v)
                for v in (
                    i,
                    matches.measurements[i].age,
                    rec.sim_id,
                    rec.base_date,
                    rec.cal_mean,
                    rec.cal_median,
                    rec.cal_sigma,
                )
            )
        )
    csvio.write_lines(overview_path, lines)

    summary_path = prefix + "_summary.csv"
    lines = csvio.header_block({"format": "finedating-summary", **header})
    lines.append(",".join(SUMMARY_COLUMNS))
    for name, value, n_used in indicators.as_rows():
        lines.append(f"{name},{csvio.fmt(value)},{n_used}")
    lines.append(f"total_matches,{csvio.fmt(matches.n_prime)},{matches.n_prime}")
    lines.append(
        f"unique_measured_ages,{csvio.fmt(matches.unique_measured_ages())},"
        f"{len(matches.measurements)}"
    )
    for age in matches.unmatched:
        lines.append(f"unmatched_age,{age},0")
    csvio.write_lines(summary_path, lines)
    return overview_path, summary_path


def read_summary(path) -> dict[str, float]:
    """Indicator name -> value from a summary file (diagnostics skipped)."""
    _, columns, rows = csvio.read_commented_csv(path)
    if columns != SUMMARY_COLUMNS:
        raise ValueError(f"not a summary file: {path}")
    values: dict[str, float] = {}
    for cells in rows:
        try:
            name = normalize_indicator(cells[0])
        except ValueError:
            continue
        values[name] = float(cells[1])
    return values
